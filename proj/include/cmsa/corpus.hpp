#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cmsa/preprocess.hpp"

namespace cmsa {

enum class InputFormat { kTsv, kConll };

InputFormat parse_input_format(std::string_view name);

// `uid<TAB>label<TAB>text` per line; label is a polarity name or "-".
std::vector<RawTweet> read_tsv(std::istream& in);

// `meta <uid> [label]` header lines, then one `surface<TAB>langtag` line per
// token; records are separated by blank lines or by the next header.
std::vector<RawTweet> read_conll(std::istream& in);

std::vector<RawTweet> read_raw(std::istream& in, InputFormat format);

struct PreprocessedCorpus {
  std::vector<TweetExample> examples;  // non-empty tweets, input order
  std::size_t dropped_empty = 0;
};

PreprocessedCorpus preprocess_corpus(const std::vector<RawTweet>& raw);

// `uid<TAB>label<TAB>tok1 tok2 ...`, label "-" when absent.
void write_tokenized(std::ostream& out, std::span<const TweetExample> examples);

// Reads tokenized or raw TSV and preprocesses every record. Running the rules
// on already tokenized text is a no-op, so both kinds of file are accepted.
PreprocessedCorpus load_corpus(std::istream& in, InputFormat format);

}  // namespace cmsa
