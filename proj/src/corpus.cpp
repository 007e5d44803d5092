#include "cmsa/corpus.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "cmsa/error.hpp"
#include "cmsa/labels.hpp"
#include "cmsa/text_format.hpp"

namespace cmsa {

namespace {

std::optional<int> parse_label(std::string_view field, std::size_t line) {
  field = trim_ws(field);
  if (field == "-") return std::nullopt;
  if (auto id = parse_polarity(field)) return id;
  throw FormatError(line, "unknown label '" + std::string(field) + "'");
}

// Strips a trailing CR and, on the first line, a UTF-8 BOM.
std::string_view clean_line(const std::string& raw, std::size_t line_no) {
  std::string_view line = raw;
  if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

InputFormat parse_input_format(std::string_view name) {
  if (name == "tsv") return InputFormat::kTsv;
  if (name == "conll") return InputFormat::kConll;
  throw ContractError("unknown input format '" + std::string(name) + "' (expected tsv or conll)");
}

std::vector<RawTweet> read_tsv(std::istream& in) {
  std::vector<RawTweet> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = clean_line(raw, line_no);
    if (trim_ws(line).empty()) continue;
    const auto first_tab = line.find('\t');
    const auto second_tab = first_tab == std::string_view::npos ? first_tab : line.find('\t', first_tab + 1);
    if (second_tab == std::string_view::npos) {
      throw FormatError(line_no, "expected uid<TAB>label<TAB>text");
    }
    RawTweet tweet;
    tweet.uid = std::string(trim_ws(line.substr(0, first_tab)));
    if (tweet.uid.empty()) throw FormatError(line_no, "empty uid");
    tweet.label = parse_label(line.substr(first_tab + 1, second_tab - first_tab - 1), line_no);
    tweet.content = std::string(line.substr(second_tab + 1));
    out.push_back(std::move(tweet));
  }
  return out;
}

std::vector<RawTweet> read_conll(std::istream& in) {
  std::vector<RawTweet> out;
  std::string raw;
  std::size_t line_no = 0;
  bool open = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = clean_line(raw, line_no);
    if (trim_ws(line).empty()) {
      open = false;
      continue;
    }
    const auto fields = split_ws(line);
    if (fields.front() == "meta") {
      if (fields.size() < 2 || fields.size() > 3) throw FormatError(line_no, "expected 'meta <uid> [label]'");
      RawTweet tweet;
      tweet.uid = std::string(fields[1]);
      if (fields.size() == 3) tweet.label = parse_label(fields[2], line_no);
      tweet.content = std::vector<TaggedToken>{};
      out.push_back(std::move(tweet));
      open = true;
      continue;
    }
    if (!open) throw FormatError(line_no, "token line outside a 'meta' record");
    TaggedToken token;
    const auto tab = line.find('\t');
    if (tab != std::string_view::npos) {
      token.surface = std::string(trim_ws(line.substr(0, tab)));
      token.lang = std::string(trim_ws(line.substr(tab + 1)));
    } else if (fields.size() >= 2) {
      token.surface = std::string(line.substr(0, fields.back().data() - line.data()));
      token.surface = std::string(trim_ws(token.surface));
      token.lang = std::string(fields.back());
    } else {
      token.surface = std::string(fields.front());
    }
    std::get<std::vector<TaggedToken>>(out.back().content).push_back(std::move(token));
  }
  return out;
}

std::vector<RawTweet> read_raw(std::istream& in, InputFormat format) {
  return format == InputFormat::kTsv ? read_tsv(in) : read_conll(in);
}

PreprocessedCorpus preprocess_corpus(const std::vector<RawTweet>& raw) {
  PreprocessedCorpus corpus;
  corpus.examples.reserve(raw.size());
  for (const auto& tweet : raw) {
    auto example = preprocess_tweet(tweet);
    if (example.tokens.empty()) {
      ++corpus.dropped_empty;
    } else {
      corpus.examples.push_back(std::move(example));
    }
  }
  return corpus;
}

void write_tokenized(std::ostream& out, std::span<const TweetExample> examples) {
  for (const auto& ex : examples) {
    out << ex.uid << '\t' << (ex.label ? polarity_name(*ex.label) : "-") << '\t' << detokenize(ex) << '\n';
  }
}

PreprocessedCorpus load_corpus(std::istream& in, InputFormat format) {
  return preprocess_corpus(read_raw(in, format));
}

}  // namespace cmsa
