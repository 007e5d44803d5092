#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cmsa/labels.hpp"
#include "cmsa/preprocess.hpp"

namespace cmsa {

// Rows are gold classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = kNumPolarities);

  static ConfusionMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);

  void add(int gold, int predicted, std::int64_t n = 1);

  std::int64_t at(int gold, int predicted) const { return counts_[index(gold, predicted)]; }
  int num_classes() const { return k_; }
  std::int64_t row_sum(int gold) const;
  std::int64_t col_sum(int predicted) const;
  std::int64_t trace() const;
  std::int64_t total() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t index(int gold, int predicted) const;

  int k_;
  std::vector<std::int64_t> counts_;
};

ConfusionMatrix confusion(std::span<const std::pair<int, int>> pairs, int num_classes = kNumPolarities);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
  bool degenerate = false;  // some ratio was 0/0 and was set to 0
};

struct AveragedMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& m);

// Per-class values averaged with weights support_k / total. This is the
// task metric. Throws ContractError("empty evaluation") on an empty matrix.
AveragedMetrics weighted_metrics(const ConfusionMatrix& m);

// Unweighted mean over classes.
AveragedMetrics macro_metrics(const ConfusionMatrix& m);

struct Misclassification {
  std::string uid;
  int gold = 0;
  int predicted = 0;
  std::string text;
};

// Every mismatch, grouped by (gold, predicted) cell in row-major order and in
// input order within a cell.
std::vector<Misclassification> error_report(std::span<const TweetExample> examples, std::span<const int> predictions);

struct EvalReport {
  ConfusionMatrix confusion;
  std::vector<ClassMetrics> per_class;
  AveragedMetrics weighted;
  AveragedMetrics macro;
  double accuracy = 0.0;
  std::vector<Misclassification> errors;
};

EvalReport evaluate(std::span<const TweetExample> examples, std::span<const int> predictions);

nlohmann::json report_to_json(const EvalReport& report);

// Confusion matrix and class-wise table at two decimals, averaged row at four.
// `macro` adds the unweighted averages.
std::string render_report(const EvalReport& report, bool macro = false);

std::string render_errors(const EvalReport& report);

// Half-up rounding to `digits` decimals, then fixed notation.
std::string format_half_up(double value, int digits);

}  // namespace cmsa
