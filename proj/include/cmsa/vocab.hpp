#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmsa/preprocess.hpp"

namespace cmsa {

// Word <-> id map. Ids 0 and 1 are reserved for UNK and PAD; the remaining
// entries are the corpus words seen at least min_count times, ordered by
// descending count with ties broken by byte-wise comparison.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kPad = 1;
  static constexpr std::string_view kUnkName = "<unk>";
  static constexpr std::string_view kPadName = "<pad>";

  Vocabulary();

  static Vocabulary build(std::span<const TweetExample> corpus, int min_count);

  // Id of `word`, or kUnk. Never returns kPad.
  int lookup(std::string_view word) const;

  // Like lookup, but also resolves the reserved names and reports misses.
  std::optional<int> find(std::string_view word) const;

  std::vector<int> encode(const TweetExample& example) const;

  std::size_t size() const { return words_.size(); }
  const std::string& word(int id) const { return words_.at(id); }
  std::int64_t count(int id) const { return counts_.at(id); }
  int min_count() const { return min_count_; }

  // Fingerprint of (min_count, words, counts); stored in model files.
  std::uint64_t fingerprint() const;

  // `#vocab v1 min_count=<k>` then `word<TAB>count` lines in id order.
  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in);

  bool operator==(const Vocabulary& other) const {
    return min_count_ == other.min_count_ && words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  void add(std::string word, std::int64_t count);

  int min_count_ = 1;
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> index_;
};

std::string format_fingerprint(std::uint64_t fingerprint);

}  // namespace cmsa
