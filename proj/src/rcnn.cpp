#include "cmsa/rcnn.hpp"

#include <cmath>
#include <string>

#include "cmsa/error.hpp"
#include "cmsa/random.hpp"
#include "cmsa/vocab.hpp"

namespace cmsa {

namespace {

Eigen::MatrixXd glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> uniform(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(rng);
  }
  return m;
}

Eigen::VectorXd activate(Activation a, const Eigen::VectorXd& z) {
  if (a == Activation::kTanh) return z.array().tanh();
  return z.cwiseMax(0.0);
}

// f'(z) expressed through y = f(z).
Eigen::RowVectorXd activation_slope(Activation a, const Eigen::RowVectorXd& y) {
  if (a == Activation::kTanh) return (1.0 - y.array().square()).matrix();
  return (y.array() > 0.0).cast<double>().matrix();
}

void expect_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ContractError(std::string("tensor ") + name + " has shape " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  }
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw ContractError("unknown activation '" + std::string(name) + "'");
}

std::string_view activation_name(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

void RcnnConfig::validate() const {
  if (embed_dim < 1 || context_dim < 1 || hidden_dim < 1 || num_classes < 1) {
    throw ContractError("all model dimensions must be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ContractError("dropout rate must be in [0, 1)");
}

RcnnParams RcnnParams::zeros(const RcnnConfig& cfg, std::size_t vocab_size) {
  cfg.validate();
  const int c = cfg.context_dim, d = cfg.embed_dim, h = cfg.hidden_dim, k = cfg.num_classes;
  RcnnParams p;
  p.left_recurrent = Eigen::MatrixXd::Zero(c, c);
  p.right_recurrent = Eigen::MatrixXd::Zero(c, c);
  p.left_input = Eigen::MatrixXd::Zero(c, d);
  p.right_input = Eigen::MatrixXd::Zero(c, d);
  p.left_start = Eigen::VectorXd::Zero(c);
  p.right_start = Eigen::VectorXd::Zero(c);
  p.hidden_weight = Eigen::MatrixXd::Zero(h, cfg.feature_dim());
  p.hidden_bias = Eigen::VectorXd::Zero(h);
  p.output_weight = Eigen::MatrixXd::Zero(k, h);
  p.output_bias = Eigen::VectorXd::Zero(k);
  p.embeddings = EmbeddingMatrix::Zero(static_cast<Eigen::Index>(vocab_size), d);
  return p;
}

RcnnParams RcnnParams::initialize(const RcnnConfig& cfg, EmbeddingMatrix embeddings, std::uint64_t seed) {
  if (embeddings.cols() != cfg.embed_dim) throw ContractError("embedding width does not match embed_dim");
  RcnnParams p = zeros(cfg, 0);
  auto rng = make_rng(seed, "rcnn.init");
  p.left_recurrent = glorot(p.left_recurrent.rows(), p.left_recurrent.cols(), rng);
  p.right_recurrent = glorot(p.right_recurrent.rows(), p.right_recurrent.cols(), rng);
  p.left_input = glorot(p.left_input.rows(), p.left_input.cols(), rng);
  p.right_input = glorot(p.right_input.rows(), p.right_input.cols(), rng);
  p.hidden_weight = glorot(p.hidden_weight.rows(), p.hidden_weight.cols(), rng);
  p.output_weight = glorot(p.output_weight.rows(), p.output_weight.cols(), rng);
  p.embeddings = std::move(embeddings);
  return p;
}

void RcnnParams::check_shapes(const RcnnConfig& cfg) const {
  const int c = cfg.context_dim, d = cfg.embed_dim, h = cfg.hidden_dim, k = cfg.num_classes;
  expect_shape(left_recurrent, c, c, "left_recurrent");
  expect_shape(right_recurrent, c, c, "right_recurrent");
  expect_shape(left_input, c, d, "left_input");
  expect_shape(right_input, c, d, "right_input");
  expect_shape(left_start, c, 1, "left_start");
  expect_shape(right_start, c, 1, "right_start");
  expect_shape(hidden_weight, h, cfg.feature_dim(), "hidden_weight");
  expect_shape(hidden_bias, h, 1, "hidden_bias");
  expect_shape(output_weight, k, h, "output_weight");
  expect_shape(output_bias, k, 1, "output_bias");
  if (embeddings.cols() != d) throw ContractError("embeddings width does not match embed_dim");
}

Gradients Gradients::zeros_like(const RcnnParams& params) {
  Gradients g;
  g.left_recurrent = Eigen::MatrixXd::Zero(params.left_recurrent.rows(), params.left_recurrent.cols());
  g.right_recurrent = Eigen::MatrixXd::Zero(params.right_recurrent.rows(), params.right_recurrent.cols());
  g.left_input = Eigen::MatrixXd::Zero(params.left_input.rows(), params.left_input.cols());
  g.right_input = Eigen::MatrixXd::Zero(params.right_input.rows(), params.right_input.cols());
  g.left_start = Eigen::VectorXd::Zero(params.left_start.size());
  g.right_start = Eigen::VectorXd::Zero(params.right_start.size());
  g.hidden_weight = Eigen::MatrixXd::Zero(params.hidden_weight.rows(), params.hidden_weight.cols());
  g.hidden_bias = Eigen::VectorXd::Zero(params.hidden_bias.size());
  g.output_weight = Eigen::MatrixXd::Zero(params.output_weight.rows(), params.output_weight.cols());
  g.output_bias = Eigen::VectorXd::Zero(params.output_bias.size());
  return g;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  left_recurrent += other.left_recurrent;
  right_recurrent += other.right_recurrent;
  left_input += other.left_input;
  right_input += other.right_input;
  left_start += other.left_start;
  right_start += other.right_start;
  hidden_weight += other.hidden_weight;
  hidden_bias += other.hidden_bias;
  output_weight += other.output_weight;
  output_bias += other.output_bias;
  for (const auto& [id, row] : other.embedding_rows) {
    auto [it, inserted] = embedding_rows.try_emplace(id, row);
    if (!inserted) it->second += row;
  }
  return *this;
}

Gradients& Gradients::operator*=(double s) {
  for_each_dense_tensor(*this, [s](std::string_view, auto& t) { t *= s; });
  for (auto& [id, row] : embedding_rows) row *= s;
  return *this;
}

ForwardTrace forward(const RcnnParams& params, const RcnnConfig& cfg, std::span<const int> token_ids,
                     const Eigen::VectorXd* dropout_mask) {
  params.check_shapes(cfg);
  const auto vocab_size = static_cast<int>(params.embeddings.rows());
  ForwardTrace t;
  for (int id : token_ids) {
    if (id < 0 || id >= vocab_size) throw ContractError("token id " + std::to_string(id) + " out of range");
    if (id != Vocabulary::kPad) t.token_ids.push_back(id);
  }
  if (t.token_ids.empty()) throw ContractError("empty sequence");

  const int n = static_cast<int>(t.token_ids.size());
  const int c = cfg.context_dim, h = cfg.hidden_dim;
  const auto& E = params.embeddings;

  t.left_context.resize(n, c);
  t.left_context.row(0) = params.left_start.transpose();
  for (int i = 1; i < n; ++i) {
    const Eigen::VectorXd z = params.left_recurrent * t.left_context.row(i - 1).transpose() +
                              params.left_input * E.row(t.token_ids[i - 1]).transpose();
    t.left_context.row(i) = activate(cfg.activation, z).transpose();
  }

  t.right_context.resize(n, c);
  t.right_context.row(n - 1) = params.right_start.transpose();
  for (int i = n - 2; i >= 0; --i) {
    const Eigen::VectorXd z = params.right_recurrent * t.right_context.row(i + 1).transpose() +
                              params.right_input * E.row(t.token_ids[i + 1]).transpose();
    t.right_context.row(i) = activate(cfg.activation, z).transpose();
  }

  t.features.resize(n, cfg.feature_dim());
  for (int i = 0; i < n; ++i) {
    t.features.row(i) << t.left_context.row(i), E.row(t.token_ids[i]), t.right_context.row(i);
  }

  Eigen::MatrixXd z2 = t.features * params.hidden_weight.transpose();
  z2.rowwise() += params.hidden_bias.transpose();
  t.hidden = z2.array().tanh();

  t.pool_argmax.assign(h, 0);
  t.pooled.resize(h);
  for (int j = 0; j < h; ++j) {
    int best = 0;
    for (int i = 1; i < n; ++i) {
      if (t.hidden(i, j) > t.hidden(best, j)) best = i;
    }
    t.pool_argmax[j] = best;
    t.pooled(j) = t.hidden(best, j);
  }

  Eigen::VectorXd dropped = t.pooled;
  if (dropout_mask != nullptr) {
    if (dropout_mask->size() != h) throw ContractError("dropout mask size does not match hidden_dim");
    t.dropout_mask = *dropout_mask;
    dropped = dropped.cwiseProduct(t.dropout_mask);
  }

  t.logits = params.output_weight * dropped + params.output_bias;
  const Eigen::ArrayXd shifted = (t.logits.array() - t.logits.maxCoeff()).exp();
  t.probs = (shifted / shifted.sum()).matrix();
  return t;
}

Loss nll_loss(const Eigen::VectorXd& probs, int gold) {
  if (gold < 0 || gold >= probs.size()) throw ContractError("gold class out of range");
  constexpr double kEps = 1e-12;
  if (probs(gold) < kEps) return Loss{-std::log(kEps), true};
  return Loss{-std::log(probs(gold)), false};
}

Gradients backward(const RcnnParams& params, const RcnnConfig& cfg, const ForwardTrace& trace, int gold) {
  const int n = static_cast<int>(trace.token_ids.size());
  const int c = cfg.context_dim, d = cfg.embed_dim, h = cfg.hidden_dim, k = cfg.num_classes;
  params.check_shapes(cfg);
  if (n == 0 || trace.features.rows() != n || trace.features.cols() != cfg.feature_dim() ||
      trace.hidden.rows() != n || trace.hidden.cols() != h || trace.left_context.cols() != c ||
      trace.right_context.cols() != c || trace.probs.size() != k ||
      static_cast<int>(trace.pool_argmax.size()) != h) {
    throw ContractError("forward trace does not match the model shapes");
  }
  if (gold < 0 || gold >= k) throw ContractError("gold class out of range");

  Gradients g = Gradients::zeros_like(params);
  const auto& E = params.embeddings;
  auto add_row = [&g](int id, const Eigen::RowVectorXd& row) {
    auto [it, inserted] = g.embedding_rows.try_emplace(id, row);
    if (!inserted) it->second += row;
  };

  // Softmax + NLL.
  Eigen::VectorXd d_logits = trace.probs;
  d_logits(gold) -= 1.0;

  const bool has_mask = trace.dropout_mask.size() > 0;
  const Eigen::VectorXd dropped = has_mask ? trace.pooled.cwiseProduct(trace.dropout_mask) : trace.pooled;
  g.output_weight = d_logits * dropped.transpose();
  g.output_bias = d_logits;
  Eigen::VectorXd d_pooled = params.output_weight.transpose() * d_logits;
  if (has_mask) d_pooled = d_pooled.cwiseProduct(trace.dropout_mask);

  // Max-pool routes each coordinate to its winning position only.
  Eigen::MatrixXd d_z2 = Eigen::MatrixXd::Zero(n, h);
  for (int j = 0; j < h; ++j) {
    const int i = trace.pool_argmax[j];
    const double y = trace.hidden(i, j);
    d_z2(i, j) = d_pooled(j) * (1.0 - y * y);
  }
  g.hidden_weight = d_z2.transpose() * trace.features;
  g.hidden_bias = d_z2.colwise().sum().transpose();
  const Eigen::MatrixXd d_features = d_z2 * params.hidden_weight;

  for (int i = 0; i < n; ++i) add_row(trace.token_ids[i], d_features.row(i).segment(c, d));

  // Left scan, unrolled backwards in time.
  Eigen::RowVectorXd carry = Eigen::RowVectorXd::Zero(c);
  for (int i = n - 1; i >= 1; --i) {
    const Eigen::RowVectorXd grad = d_features.row(i).head(c) + carry;
    const Eigen::RowVectorXd dz = grad.cwiseProduct(activation_slope(cfg.activation, trace.left_context.row(i)));
    g.left_recurrent += dz.transpose() * trace.left_context.row(i - 1);
    g.left_input += dz.transpose() * E.row(trace.token_ids[i - 1]);
    add_row(trace.token_ids[i - 1], dz * params.left_input);
    carry = dz * params.left_recurrent;
  }
  g.left_start = (d_features.row(0).head(c) + carry).transpose();

  // Right scan, unrolled forwards in position.
  carry.setZero();
  for (int i = 0; i <= n - 2; ++i) {
    const Eigen::RowVectorXd grad = d_features.row(i).tail(c) + carry;
    const Eigen::RowVectorXd dz = grad.cwiseProduct(activation_slope(cfg.activation, trace.right_context.row(i)));
    g.right_recurrent += dz.transpose() * trace.right_context.row(i + 1);
    g.right_input += dz.transpose() * E.row(trace.token_ids[i + 1]);
    add_row(trace.token_ids[i + 1], dz * params.right_input);
    carry = dz * params.right_recurrent;
  }
  g.right_start = (d_features.row(n - 1).tail(c) + carry).transpose();

  return g;
}

void apply_sgd(RcnnParams& params, const Gradients& grads, double lr) {
  params.left_recurrent -= lr * grads.left_recurrent;
  params.right_recurrent -= lr * grads.right_recurrent;
  params.left_input -= lr * grads.left_input;
  params.right_input -= lr * grads.right_input;
  params.left_start -= lr * grads.left_start;
  params.right_start -= lr * grads.right_start;
  params.hidden_weight -= lr * grads.hidden_weight;
  params.hidden_bias -= lr * grads.hidden_bias;
  params.output_weight -= lr * grads.output_weight;
  params.output_bias -= lr * grads.output_bias;
  for (const auto& [id, row] : grads.embedding_rows) {
    if (id == Vocabulary::kPad) continue;
    params.embeddings.row(id) -= lr * row;
  }
}

int argmax_class(const Eigen::VectorXd& probs) {
  int best = 0;
  for (int k = 1; k < probs.size(); ++k) {
    if (probs(k) > probs(best)) best = k;
  }
  return best;
}

Prediction predict(const RcnnParams& params, const RcnnConfig& cfg, std::span<const int> token_ids) {
  ForwardTrace t = forward(params, cfg, token_ids);
  return Prediction{argmax_class(t.probs), std::move(t.probs)};
}

Eigen::VectorXd sample_dropout_mask(int size, double rate, std::mt19937_64& rng) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(size);
  if (rate <= 0.0) return mask;
  std::bernoulli_distribution keep(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (int i = 0; i < size; ++i) mask(i) = keep(rng) ? scale : 0.0;
  return mask;
}

}  // namespace cmsa
