#include "cmsa/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <ostream>
#include <exception>
#include <thread>

#include "cmsa/error.hpp"
#include "cmsa/metrics.hpp"
#include "cmsa/random.hpp"

namespace cmsa {

namespace {

std::vector<EncodedExample> encode_labeled(std::span<const TweetExample> examples, const Vocabulary& vocab,
                                           std::size_t& dropped, const char* which) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    if (ex.tokens.empty()) {
      ++dropped;
      continue;
    }
    if (!ex.label) throw ContractError(std::string(which) + " example '" + ex.uid + "' has no label");
    out.push_back({vocab.encode(ex), *ex.label});
  }
  return out;
}

double weighted_f1(const RcnnParams& params, const RcnnConfig& cfg, std::span<const EncodedExample> data) {
  ConfusionMatrix m(cfg.num_classes);
  for (const auto& ex : data) m.add(ex.label, predict(params, cfg, ex.ids).label);
  return weighted_metrics(m).f1;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr >= 0.0)) throw ContractError("lr must be >= 0");
  if (batch_size < 1) throw ContractError("batch size must be >= 1");
  if (max_epochs < 1) throw ContractError("max_epochs must be >= 1");
  if (patience < 0) throw ContractError("patience must be >= 0");
}

nlohmann::json epoch_to_json(const EpochRecord& r, bool best) {
  nlohmann::json j = {{"epoch", r.epoch},
                      {"train_loss", r.train_loss},
                      {"train_accuracy", r.train_accuracy},
                      {"updates", r.updates},
                      {"best", best}};
  j["val_weighted_f1"] = r.val_f1 ? nlohmann::json(*r.val_f1) : nlohmann::json(nullptr);
  return j;
}

void write_report_jsonl(std::ostream& out, const TrainReport& report) {
  for (const auto& r : report.epochs) out << epoch_to_json(r, r.epoch == report.best_epoch).dump() << '\n';
}

std::vector<std::span<const std::size_t>> epoch_batches(std::vector<std::size_t>& order, int batch_size, bool shuffle,
                                                        std::mt19937_64& rng) {
  if (batch_size < 1) throw ContractError("batch size must be >= 1");
  if (shuffle) std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::span<const std::size_t>> out;
  const std::span<const std::size_t> all(order);
  for (std::size_t begin = 0; begin < all.size(); begin += batch_size) {
    out.push_back(all.subspan(begin, std::min<std::size_t>(batch_size, all.size() - begin)));
  }
  return out;
}

Gradients mean_gradient(const RcnnParams& params, const RcnnConfig& cfg, std::span<const EncodedExample> batch,
                        std::span<const Eigen::VectorXd> masks) {
  if (batch.empty()) throw ContractError("empty batch");
  if (!masks.empty() && masks.size() != batch.size()) throw ContractError("one dropout mask per example expected");
  Gradients acc = Gradients::zeros_like(params);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto trace = forward(params, cfg, batch[i].ids, masks.empty() ? nullptr : &masks[i]);
    acc += backward(params, cfg, trace, batch[i].label);
  }
  acc *= 1.0 / static_cast<double>(batch.size());
  return acc;
}

TrainResult train(RcnnParams params, const RcnnConfig& model_cfg, std::span<const TweetExample> train_set,
                  std::span<const TweetExample> val_set, const Vocabulary& vocab, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  model_cfg.validate();
  cfg.validate();
  params.check_shapes(model_cfg);
  const auto start = std::chrono::steady_clock::now();

  TrainResult result;
  TrainReport& report = result.report;
  const auto data = encode_labeled(train_set, vocab, report.dropped_train, "training");
  const auto val = encode_labeled(val_set, vocab, report.dropped_val, "validation");
  if (data.empty()) throw ContractError("empty training set");
  if (val.empty()) report.warnings.push_back("validation set is empty; keeping the final epoch");

  auto shuffle_rng = make_rng(cfg.seed, "shuffle");
  auto dropout_rng = make_rng(cfg.seed, "dropout");
  const bool use_dropout = model_cfg.dropout_rate > 0.0;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  double best_f1 = -std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (const auto batch : epoch_batches(order, cfg.batch_size, cfg.shuffle, shuffle_rng)) {
      Gradients acc = Gradients::zeros_like(params);
      for (const std::size_t index : batch) {
        const auto& ex = data[index];
        Eigen::VectorXd mask;
        if (use_dropout) mask = sample_dropout_mask(model_cfg.hidden_dim, model_cfg.dropout_rate, dropout_rng);
        const auto trace = forward(params, model_cfg, ex.ids, use_dropout ? &mask : nullptr);
        loss_sum += nll_loss(trace.probs, ex.label).value;
        correct += argmax_class(trace.probs) == ex.label;
        acc += backward(params, model_cfg, trace, ex.label);
      }
      acc *= 1.0 / static_cast<double>(batch.size());
      apply_sgd(params, acc, cfg.lr);
      ++record.updates;
    }
    record.train_loss = loss_sum / static_cast<double>(data.size());
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());

    bool stop = false;
    if (!val.empty()) {
      record.val_f1 = weighted_f1(params, model_cfg, val);
      if (*record.val_f1 > best_f1) {
        best_f1 = *record.val_f1;
        result.best = params;
        report.best_epoch = epoch;
        since_best = 0;
      } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
        stop = true;
      }
    }
    report.epochs.push_back(record);
    if (on_epoch && !on_epoch(record, params)) stop = true;
    if (stop) break;
  }

  if (val.empty()) {
    result.best = std::move(params);
    report.best_epoch = report.epochs.back().epoch;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<Prediction> predict_all(const RcnnParams& params, const RcnnConfig& cfg, const Vocabulary& vocab,
                                    std::span<const TweetExample> examples, int threads) {
  std::vector<Prediction> out(examples.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = predict(params, cfg, vocab.encode(examples[i]));
  };
  const std::size_t n = examples.size();
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(1, n));
  if (workers == 1) {
    work(0, n);
    return out;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) continue;
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

}  // namespace cmsa
