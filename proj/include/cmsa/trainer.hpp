#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmsa/preprocess.hpp"
#include "cmsa/rcnn.hpp"
#include "cmsa/vocab.hpp"

namespace cmsa {

struct TrainConfig {
  double lr = 0.6;
  int batch_size = 64;
  int max_epochs = 30;
  int patience = 5;  // epochs without validation improvement; 0 disables
  std::uint64_t seed = 1;
  bool shuffle = true;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;                 // 1-based
  double train_loss = 0.0;       // mean NLL seen during the epoch (dropout on)
  double train_accuracy = 0.0;   // same passes, before each batch update
  std::optional<double> val_f1;  // weighted F1, evaluation mode
  std::size_t updates = 0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double wall_seconds = 0.0;
  std::size_t dropped_train = 0;
  std::size_t dropped_val = 0;
  std::vector<std::string> warnings;
};

nlohmann::json epoch_to_json(const EpochRecord& record, bool best);

// One JSON object per epoch. Wall time is left out so reruns are byte-identical.
void write_report_jsonl(std::ostream& out, const TrainReport& report);

struct TrainResult {
  RcnnParams best;
  TrainReport report;
};

// Called after every epoch with the current parameters; return false to stop.
using EpochCallback = std::function<bool(const EpochRecord&, const RcnnParams&)>;

// Mini-batch SGD: per epoch a seeded shuffle, batches of at most batch_size,
// gradient averaged over the batch, params -= lr * mean gradient. A fresh
// dropout mask is drawn for every example. The parameters of the epoch with
// the best validation weighted F1 are returned (the final epoch when `val`
// is empty). Tweets without tokens are dropped and counted.
TrainResult train(RcnnParams params, const RcnnConfig& model_cfg, std::span<const TweetExample> train_set,
                  std::span<const TweetExample> val_set, const Vocabulary& vocab, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Batches of one epoch: `order` is shuffled in place (when `shuffle`) and cut
// into consecutive runs of at most batch_size indices.
std::vector<std::span<const std::size_t>> epoch_batches(std::vector<std::size_t>& order, int batch_size, bool shuffle,
                                                        std::mt19937_64& rng);

struct EncodedExample {
  std::vector<int> ids;
  int label = 0;
};

// Mean gradient over `batch`; masks[i] (if given) is the dropout mask of
// example i. Reduction runs in index order.
Gradients mean_gradient(const RcnnParams& params, const RcnnConfig& cfg, std::span<const EncodedExample> batch,
                        std::span<const Eigen::VectorXd> masks = {});

// Evaluation-mode predictions; `threads` > 1 splits the work, output order is
// the input order either way.
std::vector<Prediction> predict_all(const RcnnParams& params, const RcnnConfig& cfg, const Vocabulary& vocab,
                                    std::span<const TweetExample> examples, int threads = 1);

}  // namespace cmsa
