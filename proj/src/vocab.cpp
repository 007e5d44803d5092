#include "cmsa/vocab.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>

#include "cmsa/error.hpp"
#include "cmsa/random.hpp"
#include "cmsa/text_format.hpp"

namespace cmsa {

Vocabulary::Vocabulary() {
  words_ = {std::string(kUnkName), std::string(kPadName)};
  counts_ = {0, 0};
}

void Vocabulary::add(std::string word, std::int64_t count) {
  const int id = static_cast<int>(words_.size());
  index_.emplace(word, id);
  words_.push_back(std::move(word));
  counts_.push_back(count);
}

Vocabulary Vocabulary::build(std::span<const TweetExample> corpus, int min_count) {
  if (min_count < 1) throw ContractError("min_count must be >= 1");
  std::map<std::string, std::int64_t, std::less<>> counts;
  for (const auto& ex : corpus) {
    for (const auto& token : ex.tokens) ++counts[token.text];
  }

  std::vector<std::pair<std::string, std::int64_t>> kept;
  std::int64_t unk = 0;
  for (auto& [word, n] : counts) {
    // The reserved names never become ordinary entries.
    if (n >= min_count && word != kUnkName && word != kPadName) {
      kept.emplace_back(word, n);
    } else {
      unk += n;
    }
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary v;
  v.min_count_ = min_count;
  v.counts_[kUnk] = unk;
  for (auto& [word, n] : kept) v.add(std::move(word), n);
  return v;
}

int Vocabulary::lookup(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

std::optional<int> Vocabulary::find(std::string_view word) const {
  if (word == kUnkName) return kUnk;
  if (word == kPadName) return kPad;
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Vocabulary::encode(const TweetExample& example) const {
  std::vector<int> ids;
  ids.reserve(example.tokens.size());
  for (const auto& token : example.tokens) ids.push_back(lookup(token.text));
  return ids;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = fnv1a("min_count=" + std::to_string(min_count_));
  for (std::size_t i = 0; i < words_.size(); ++i) {
    h = fnv1a(words_[i], h);
    h = fnv1a("\t" + std::to_string(counts_[i]) + "\n", h);
  }
  return h;
}

std::string format_fingerprint(std::uint64_t fingerprint) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
  return buf;
}

void Vocabulary::save(std::ostream& out) const {
  out << "#vocab v1 min_count=" << min_count_ << '\n';
  for (std::size_t i = 0; i < words_.size(); ++i) out << words_[i] << '\t' << counts_[i] << '\n';
}

Vocabulary Vocabulary::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(1, "missing vocabulary header");
  constexpr std::string_view kHeader = "#vocab v1 min_count=";
  if (!std::string_view(line).starts_with(kHeader)) throw FormatError(1, "bad vocabulary header");
  Vocabulary v;
  v.min_count_ = static_cast<int>(parse_int(std::string_view(line).substr(kHeader.size()), 1));
  if (v.min_count_ < 1) throw FormatError(1, "min_count must be >= 1");

  std::size_t line_no = 1;
  std::size_t entries = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw FormatError(line_no, "expected word<TAB>count");
    std::string word = line.substr(0, tab);
    const auto count = parse_int(std::string_view(line).substr(tab + 1), line_no);
    const std::size_t id = entries++;
    if (id < 2) {
      const std::string_view expected = id == kUnk ? kUnkName : kPadName;
      if (word != expected) throw FormatError(line_no, "expected reserved entry " + std::string(expected));
      v.counts_[id] = count;
      continue;
    }
    if (count < v.min_count_) throw FormatError(line_no, "count below min_count");
    if (v.find(word)) throw FormatError(line_no, "duplicate word '" + word + "'");
    v.add(std::move(word), count);
  }
  if (entries < 2) throw FormatError(line_no, "vocabulary lacks reserved entries");
  return v;
}

}  // namespace cmsa
