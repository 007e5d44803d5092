#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "cmsa/embed.hpp"

namespace cmsa {

enum class Activation { kTanh, kRelu };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation a);

struct RcnnConfig {
  int embed_dim = 300;
  int context_dim = 5;
  int hidden_dim = 64;
  int num_classes = 3;
  Activation activation = Activation::kTanh;  // recurrence non-linearity
  double dropout_rate = 0.1;

  int feature_dim() const { return 2 * context_dim + embed_dim; }
  void validate() const;
};

// Recurrent convolutional network over a token sequence:
//
//   cl_1 = left_start,  cl_i = f(left_recurrent cl_{i-1} + left_input e_{i-1})
//   cr_n = right_start, cr_i = f(right_recurrent cr_{i+1} + right_input e_{i+1})
//   x_i  = [cl_i; e_i; cr_i]
//   y2_i = tanh(hidden_weight x_i + hidden_bias)
//   y3   = max_i y2_i            (elementwise, PAD positions excluded)
//   y4   = output_weight y3 + output_bias,  p = softmax(y4)
struct RcnnParams {
  Eigen::MatrixXd left_recurrent;   // c x c
  Eigen::MatrixXd right_recurrent;  // c x c
  Eigen::MatrixXd left_input;       // c x d
  Eigen::MatrixXd right_input;      // c x d
  Eigen::VectorXd left_start;       // c
  Eigen::VectorXd right_start;      // c
  Eigen::MatrixXd hidden_weight;    // h x (2c + d)
  Eigen::VectorXd hidden_bias;      // h
  Eigen::MatrixXd output_weight;    // K x h
  Eigen::VectorXd output_bias;      // K
  EmbeddingMatrix embeddings;       // V x d, fine-tuned with the rest

  static RcnnParams zeros(const RcnnConfig& cfg, std::size_t vocab_size);

  // Glorot-uniform matrices, zero biases and start contexts.
  static RcnnParams initialize(const RcnnConfig& cfg, EmbeddingMatrix embeddings, std::uint64_t seed);

  void check_shapes(const RcnnConfig& cfg) const;
};

// Gradients of the loss, shaped like RcnnParams. Embedding gradients are kept
// only for rows that occurred in the input.
struct Gradients {
  Eigen::MatrixXd left_recurrent;
  Eigen::MatrixXd right_recurrent;
  Eigen::MatrixXd left_input;
  Eigen::MatrixXd right_input;
  Eigen::VectorXd left_start;
  Eigen::VectorXd right_start;
  Eigen::MatrixXd hidden_weight;
  Eigen::VectorXd hidden_bias;
  Eigen::MatrixXd output_weight;
  Eigen::VectorXd output_bias;
  std::map<int, Eigen::RowVectorXd> embedding_rows;

  static Gradients zeros_like(const RcnnParams& params);

  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double s);
};

// Visits the ten dense tensors shared by RcnnParams and Gradients.
template <typename T, typename Fn>
void for_each_dense_tensor(T& t, Fn&& fn) {
  fn("left_recurrent", t.left_recurrent);
  fn("right_recurrent", t.right_recurrent);
  fn("left_input", t.left_input);
  fn("right_input", t.right_input);
  fn("left_start", t.left_start);
  fn("right_start", t.right_start);
  fn("hidden_weight", t.hidden_weight);
  fn("hidden_bias", t.hidden_bias);
  fn("output_weight", t.output_weight);
  fn("output_bias", t.output_bias);
}

template <typename T, typename Fn>
void for_each_tensor(T& params, Fn&& fn) {
  for_each_dense_tensor(params, fn);
  fn("embeddings", params.embeddings);
}

struct ForwardTrace {
  std::vector<int> token_ids;      // input with PAD positions removed
  Eigen::MatrixXd left_context;    // n x c
  Eigen::MatrixXd right_context;   // n x c
  Eigen::MatrixXd features;        // n x (2c + d)
  Eigen::MatrixXd hidden;          // n x h, the y2 rows
  std::vector<int> pool_argmax;    // h winning positions (first on ties)
  Eigen::VectorXd pooled;          // y3 before dropout
  Eigen::VectorXd dropout_mask;    // empty in evaluation mode
  Eigen::VectorXd logits;          // y4
  Eigen::VectorXd probs;           // p
};

// Throws ContractError("empty sequence") when no non-PAD token is given.
ForwardTrace forward(const RcnnParams& params, const RcnnConfig& cfg, std::span<const int> token_ids,
                     const Eigen::VectorXd* dropout_mask = nullptr);

struct Loss {
  double value = 0.0;
  bool clamped = false;  // p[gold] was below 1e-12
};

Loss nll_loss(const Eigen::VectorXd& probs, int gold);

// Exact gradient of nll_loss(forward(...), gold) with respect to every
// parameter, by reverse-mode differentiation through both recurrences.
Gradients backward(const RcnnParams& params, const RcnnConfig& cfg, const ForwardTrace& trace, int gold);

// params -= lr * grads
void apply_sgd(RcnnParams& params, const Gradients& grads, double lr);

struct Prediction {
  int label = 0;
  Eigen::VectorXd probs;
};

// Argmax of p, lowest class index on ties.
int argmax_class(const Eigen::VectorXd& probs);

Prediction predict(const RcnnParams& params, const RcnnConfig& cfg, std::span<const int> token_ids);

// Inverted dropout: each unit kept with probability 1 - rate and scaled by
// 1 / (1 - rate).
Eigen::VectorXd sample_dropout_mask(int size, double rate, std::mt19937_64& rng);

}  // namespace cmsa
