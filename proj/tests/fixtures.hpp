#pragma once

// Shared frozen values and small builders for the test binaries.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cmsa/embed.hpp"
#include "cmsa/metrics.hpp"
#include "cmsa/preprocess.hpp"
#include "cmsa/rcnn.hpp"

namespace fixtures {

// Published confusion counts (rows gold, columns predicted; positive,
// negative, neutral).
inline const std::vector<std::vector<std::int64_t>> kSkipGramCounts = {
    {729, 35, 236}, {24, 624, 252}, {175, 210, 715}};
inline const std::vector<std::vector<std::int64_t>> kCbowCounts = {
    {709, 41, 250}, {33, 630, 237}, {232, 240, 628}};

// Exact values from tools/oracles/metrics_tables.py (rational arithmetic).
struct Triple {
  double p, r, f;
};
inline constexpr Triple kSkipGramWeighted{0.69520087500376171, 0.68933333333333335, 0.69139373431296625};
inline constexpr Triple kSkipGramMacro{0.6993248509608132, 0.69077777777777782, 0.6942122043515957};
inline constexpr Triple kCbowWeighted{0.6566235407628308, 0.65566666666666662, 0.65608632079642382};
inline constexpr Triple kSkipGramClass[3] = {{0.78556034482758619, 0.72899999999999998, 0.75622406639004147},
                                             {0.71806674338319909, 0.69333333333333336, 0.70548332391181456},
                                             {0.59434746467165422, 0.65000000000000002, 0.62092922275293094}};
inline constexpr Triple kCbowClass[3] = {{0.72792607802874743, 0.70899999999999996, 0.71833839918946307},
                                         {0.69154774972557631, 0.69999999999999996, 0.69574820541137494},
                                         {0.56322869955156951, 0.57090909090909092, 0.56704288939051917}};

// Published table values.
inline constexpr Triple kTableSkipGram{0.6952, 0.6893, 0.6913};
inline constexpr Triple kTableCbow{0.6566, 0.6556, 0.6560};
inline constexpr Triple kTableSkipGramClass[3] = {{0.79, 0.73, 0.76}, {0.72, 0.69, 0.71}, {0.59, 0.65, 0.62}};
inline constexpr Triple kTableCbowClass[3] = {{0.73, 0.71, 0.72}, {0.69, 0.70, 0.70}, {0.56, 0.57, 0.57}};

inline cmsa::TweetExample example(std::string uid, const std::vector<std::string>& words, int label) {
  cmsa::TweetExample ex;
  ex.uid = std::move(uid);
  for (const auto& w : words) ex.tokens.push_back({w, cmsa::classify_token(w)});
  ex.label = label;
  return ex;
}

// Examples and predictions whose confusion matrix is exactly `counts`.
inline void replay(const std::vector<std::vector<std::int64_t>>& counts, std::vector<cmsa::TweetExample>& examples,
                   std::vector<int>& predictions) {
  int uid = 0;
  for (int g = 0; g < static_cast<int>(counts.size()); ++g) {
    for (int p = 0; p < static_cast<int>(counts[g].size()); ++p) {
      for (std::int64_t i = 0; i < counts[g][p]; ++i) {
        examples.push_back(example("t" + std::to_string(uid++), {"w"}, g));
        predictions.push_back(p);
      }
    }
  }
}

// Forward golden fixtures; the expected numbers come from
// tools/oracles/forward_fixture.py (50-digit scalar arithmetic).
inline cmsa::RcnnConfig symmetric_config() {
  cmsa::RcnnConfig cfg;
  cfg.embed_dim = 2;
  cfg.context_dim = 2;
  cfg.hidden_dim = 2;
  cfg.num_classes = 2;
  cfg.dropout_rate = 0.0;
  return cfg;
}

// Vocabulary rows: 0 UNK, 1 PAD, 2 = (1,0), 3 = (0,1).
inline cmsa::RcnnParams symmetric_params() {
  const auto cfg = symmetric_config();
  auto p = cmsa::RcnnParams::zeros(cfg, 4);
  p.left_recurrent.setConstant(0.1);
  p.right_recurrent.setConstant(0.1);
  p.left_input.setConstant(0.1);
  p.right_input.setConstant(0.1);
  p.hidden_weight.setConstant(0.1);
  p.output_weight.setConstant(0.1);
  p.embeddings.row(2) << 1.0, 0.0;
  p.embeddings.row(3) << 0.0, 1.0;
  return p;
}

inline constexpr double kSymmetricContext = 0.099667994624955817118;  // tanh(0.1)
inline constexpr double kSymmetricHidden = 0.11936184401095276969;
inline constexpr double kSymmetricLogit = 0.023872368802190553938;

inline cmsa::RcnnConfig asymmetric_config() {
  auto cfg = symmetric_config();
  cfg.num_classes = 3;
  return cfg;
}

// Rows 2, 3, 4 = (1,0), (0,1), (0.5,-0.5); the sequence is [2, 3, 4].
inline cmsa::RcnnParams asymmetric_params() {
  const auto cfg = asymmetric_config();
  auto p = cmsa::RcnnParams::zeros(cfg, 5);
  p.left_recurrent << 0.2, -0.1, 0.05, 0.3;
  p.right_recurrent << -0.15, 0.25, 0.1, 0.05;
  p.left_input << 0.4, -0.2, 0.1, 0.3;
  p.right_input << -0.3, 0.2, 0.25, -0.1;
  p.left_start << 0.05, -0.02;
  p.right_start << -0.03, 0.04;
  p.hidden_weight << 0.1, -0.2, 0.3, -0.1, 0.2, 0.05,  //
      -0.05, 0.15, -0.25, 0.2, -0.1, 0.3;
  p.hidden_bias << 0.01, -0.02;
  p.output_weight << 0.5, -0.4, -0.3, 0.6, 0.2, 0.1;
  p.output_bias << 0.1, 0.0, -0.1;
  p.embeddings.row(2) << 1.0, 0.0;
  p.embeddings.row(3) << 0.0, 1.0;
  p.embeddings.row(4) << 0.5, -0.5;
  return p;
}

inline constexpr double kAsymLeft[3][2] = {{0.05, -0.02},
                                           {0.39016953754161028525, 0.096201567540129277353},
                                           {-0.13083200332446316365, 0.33492824990191769925}};
inline constexpr double kAsymRight[3][2] = {{0.27082357891518663402, -0.11401292792096913749},
                                            {-0.23124083130717388965, 0.17226500051259905595},
                                            {-0.03, 0.04}};
inline constexpr double kAsymHidden[3][2] = {{0.35177157140723575594, -0.32460526690036103952},
                                             {-0.10744196005216924677, 0.2446604620091033203},
                                             {0.12526964606384960178, -0.17150723262419338783}};
inline constexpr double kAsymPooled[2] = {0.35177157140723575594, 0.2446604620091033203};
inline constexpr int kAsymArgmax[2] = {0, 1};
inline constexpr double kAsymLogits[3] = {0.17802160089997654985, 0.041264805783291265396,
                                          -0.0051796395176425167815};
inline constexpr double kAsymProbs[3] = {0.36971543928008843824, 0.32245926932682470099,
                                         0.30782529139308686077};

// 2000 sentences of eight tokens, each drawn from one of ten topics of 20
// filler words (topic = sentence index mod 10). Every topic-0 sentence also
// holds "alpha" and "beta" at most three positions apart; every topic-5
// sentence holds "gamma", so gamma never shares a window with the other two.
inline std::vector<cmsa::TweetExample> cooccurrence_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> filler(0, 19), pos(0, 4), gap(1, 3), slot(0, 7);
  std::vector<cmsa::TweetExample> out;
  for (int s = 0; s < 2000; ++s) {
    const int topic = s % 10;
    std::vector<std::string> words(8);
    for (auto& w : words) w = "t" + std::to_string(topic) + "w" + std::to_string(filler(rng));
    if (topic == 0) {
      const int a = pos(rng);
      words[a] = "alpha";
      words[a + gap(rng)] = "beta";
    } else if (topic == 5) {
      words[slot(rng)] = "gamma";
    }
    out.push_back(example(std::to_string(s), words, 0));
  }
  return out;
}

// 32 tweets, label i mod 3. Each holds "mark_<label>" somewhere among two to
// five fillers shared by all classes, so only the marker reveals the class.
inline std::vector<cmsa::TweetExample> marker_corpus(std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> filler(0, 9), len(2, 5);
  std::vector<cmsa::TweetExample> out;
  for (int i = 0; i < 32; ++i) {
    const int label = i % 3;
    std::vector<std::string> words;
    for (int k = len(rng); k > 0; --k) words.push_back("common" + std::to_string(filler(rng)));
    const auto at = std::uniform_int_distribution<std::size_t>(0, words.size())(rng);
    words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), "mark_" + std::to_string(label));
    out.push_back(example("m" + std::to_string(i), words, label));
  }
  return out;
}

inline cmsa::RcnnConfig marker_config() {
  cmsa::RcnnConfig cfg;
  cfg.embed_dim = 16;
  cfg.context_dim = 5;
  cfg.hidden_dim = 32;
  return cfg;  // dropout 0.1, tanh
}

}  // namespace fixtures
