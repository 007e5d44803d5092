#pragma once

// Central finite-difference check of rcnn::backward on random instances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cmsa/rcnn.hpp"
#include "cmsa/vocab.hpp"

namespace gradcheck {

struct Instance {
  cmsa::RcnnConfig cfg;
  cmsa::RcnnParams params;
  std::vector<int> ids;
  Eigen::VectorXd mask;  // empty: evaluation mode
  int gold = 0;
};

// d, c, h in [1, 8], n in [1, 6], K = 3. Every tensor, biases and start
// contexts included, is filled with non-zero values.
inline Instance random_instance(std::uint64_t seed, cmsa::Activation act = cmsa::Activation::kTanh,
                                bool with_mask = false) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 8), len(1, 6);
  std::uniform_real_distribution<double> val(-0.9, 0.9);
  Instance in;
  in.cfg.embed_dim = dim(rng);
  in.cfg.context_dim = dim(rng);
  in.cfg.hidden_dim = dim(rng);
  in.cfg.num_classes = 3;
  in.cfg.activation = act;
  in.cfg.dropout_rate = with_mask ? 0.25 : 0.0;
  const int vocab = 7;
  in.params = cmsa::RcnnParams::zeros(in.cfg, vocab);
  cmsa::for_each_tensor(in.params, [&](const char*, auto& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = val(rng);
  });
  in.params.embeddings.row(cmsa::Vocabulary::kPad).setZero();
  std::uniform_int_distribution<int> word(2, vocab - 1);
  const int n = len(rng);
  for (int i = 0; i < n; ++i) in.ids.push_back(word(rng));
  if (n > 1) in.ids[n - 1] = cmsa::Vocabulary::kUnk;  // UNK is a trainable row too
  in.gold = std::uniform_int_distribution<int>(0, 2)(rng);
  if (with_mask) in.mask = cmsa::sample_dropout_mask(in.cfg.hidden_dim, in.cfg.dropout_rate, rng);
  return in;
}

inline double loss(const Instance& in, const cmsa::RcnnParams& p) {
  const auto trace = cmsa::forward(p, in.cfg, in.ids, in.mask.size() ? &in.mask : nullptr);
  return cmsa::nll_loss(trace.probs, in.gold).value;
}

struct Outcome {
  double worst = 0.0;  // max |analytic - numeric| / max(1, |analytic|)
  std::string where;
  std::size_t coordinates = 0;
};

inline Outcome check(Instance in, double step = 1e-5) {
  const auto trace = cmsa::forward(in.params, in.cfg, in.ids, in.mask.size() ? &in.mask : nullptr);
  const auto grads = cmsa::backward(in.params, in.cfg, trace, in.gold);
  Outcome out;
  auto compare = [&](const std::string& name, Eigen::Index i, double analytic, double& slot) {
    const double saved = slot;
    slot = saved + step;
    const double up = loss(in, in.params);
    slot = saved - step;
    const double down = loss(in, in.params);
    slot = saved;
    const double numeric = (up - down) / (2 * step);
    const double err = std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
    ++out.coordinates;
    if (err > out.worst) {
      out.worst = err;
      out.where = name + "[" + std::to_string(i) + "]";
    }
  };

  auto& params = in.params;
  cmsa::for_each_dense_tensor(params, [&](const char* name, auto& t) {
    Eigen::MatrixXd g;
    cmsa::for_each_dense_tensor(grads, [&](const char* gname, const auto& gt) {
      if (std::string(gname) == name) g = gt;
    });
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c) compare(name, r * t.cols() + c, g(r, c), t(r, c));
  });
  for (int id = 0; id < params.embeddings.rows(); ++id) {
    if (id == cmsa::Vocabulary::kPad) continue;
    const auto it = grads.embedding_rows.find(id);
    for (Eigen::Index c = 0; c < params.embeddings.cols(); ++c) {
      const double analytic = it == grads.embedding_rows.end() ? 0.0 : it->second(c);
      compare("embeddings." + std::to_string(id), c, analytic, params.embeddings(id, c));
    }
  }
  return out;
}

}  // namespace gradcheck
