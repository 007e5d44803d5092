#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmsa/preprocess.hpp"
#include "cmsa/vocab.hpp"

namespace cmsa {

// Row i is e(word_i); one row per vocabulary id.
using EmbeddingMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class EmbedMode { kSkipGram, kCbow };

EmbedMode parse_embed_mode(std::string_view name);

struct EmbedTrainConfig {
  EmbedMode mode = EmbedMode::kSkipGram;
  int dim = 300;
  double lr = 0.05;
  int window = 5;
  int epochs = 5;
  int negatives = 5;
  std::uint64_t seed = 1;

  void validate() const;
};

// Uniform in [-0.5/dim, 0.5/dim]; the PAD row is zero.
EmbeddingMatrix init_embeddings(std::size_t vocab_size, int dim, std::uint64_t seed);

// Unigram counts raised to 0.75 and normalized; PAD gets zero mass.
std::vector<double> noise_distribution(const Vocabulary& vocab);

struct EmbedTrainResult {
  EmbeddingMatrix vectors;
  bool trained = false;
  std::string warning;
  std::uint64_t updates = 0;  // (center, window) steps that produced an update
};

// Word-level skip-gram or CBOW with negative sampling, learning rate decayed
// linearly to zero over all epochs. Single threaded and fully determined by
// cfg.seed. Returns the input-side vectors.
EmbedTrainResult train_embeddings(std::span<const TweetExample> corpus, const Vocabulary& vocab,
                                  const EmbedTrainConfig& cfg);

// word2vec text format: "V d" header, then `word v1 ... vd` per id. Values
// use the shortest decimal form that reads back to the same double.
void save_word2vec_text(std::ostream& out, const EmbeddingMatrix& vectors, const Vocabulary& vocab);

struct Word2VecLoadStats {
  std::size_t loaded = 0;
  std::size_t skipped = 0;  // file words missing from the vocabulary
};

// Overwrites the rows of `vectors` whose words appear in the file; other rows
// keep their values. The file dimension must equal vectors.cols().
Word2VecLoadStats load_word2vec_text(std::istream& in, const Vocabulary& vocab, EmbeddingMatrix& vectors);

}  // namespace cmsa
