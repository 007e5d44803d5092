#include "cmsa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cmsa/error.hpp"

namespace cmsa {

namespace {

double ratio(std::int64_t num, std::int64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string class_name(int k) {
  return k < kNumPolarities ? std::string(polarity_name(k)) : "class" + std::to_string(k);
}

nlohmann::json averaged_json(const AveragedMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : k_(num_classes), counts_(static_cast<std::size_t>(num_classes) * num_classes, 0) {
  if (num_classes < 1) throw ContractError("confusion matrix needs at least one class");
}

ConfusionMatrix ConfusionMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  ConfusionMatrix m(static_cast<int>(rows.size()));
  for (int g = 0; g < m.k_; ++g) {
    if (static_cast<int>(rows[g].size()) != m.k_) throw ContractError("confusion matrix must be square");
    for (int p = 0; p < m.k_; ++p) m.add(g, p, rows[g][p]);
  }
  return m;
}

std::size_t ConfusionMatrix::index(int gold, int predicted) const {
  if (gold < 0 || gold >= k_ || predicted < 0 || predicted >= k_) throw ContractError("class index out of range");
  return static_cast<std::size_t>(gold) * k_ + predicted;
}

void ConfusionMatrix::add(int gold, int predicted, std::int64_t n) {
  if (n < 0) throw ContractError("negative count");
  counts_[index(gold, predicted)] += n;
}

std::int64_t ConfusionMatrix::row_sum(int gold) const {
  std::int64_t s = 0;
  for (int p = 0; p < k_; ++p) s += at(gold, p);
  return s;
}

std::int64_t ConfusionMatrix::col_sum(int predicted) const {
  std::int64_t s = 0;
  for (int g = 0; g < k_; ++g) s += at(g, predicted);
  return s;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t s = 0;
  for (int k = 0; k < k_; ++k) s += at(k, k);
  return s;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t s = 0;
  for (auto c : counts_) s += c;
  return s;
}

ConfusionMatrix confusion(std::span<const std::pair<int, int>> pairs, int num_classes) {
  ConfusionMatrix m(num_classes);
  for (const auto& [gold, predicted] : pairs) m.add(gold, predicted);
  return m;
}

std::vector<ClassMetrics> class_metrics(const ConfusionMatrix& m) {
  std::vector<ClassMetrics> out(m.num_classes());
  for (int k = 0; k < m.num_classes(); ++k) {
    auto& c = out[k];
    c.support = m.row_sum(k);
    c.precision = ratio(m.at(k, k), m.col_sum(k), c.degenerate);
    c.recall = ratio(m.at(k, k), c.support, c.degenerate);
    if (c.precision + c.recall > 0.0) {
      c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
    } else {
      c.f1 = 0.0;
      c.degenerate = true;
    }
  }
  return out;
}

AveragedMetrics weighted_metrics(const ConfusionMatrix& m) {
  const auto total = m.total();
  if (total == 0) throw ContractError("empty evaluation");
  AveragedMetrics avg;
  for (const auto& c : class_metrics(m)) {
    const double w = static_cast<double>(c.support) / static_cast<double>(total);
    avg.precision += w * c.precision;
    avg.recall += w * c.recall;
    avg.f1 += w * c.f1;
  }
  return avg;
}

AveragedMetrics macro_metrics(const ConfusionMatrix& m) {
  AveragedMetrics avg;
  const auto per_class = class_metrics(m);
  for (const auto& c : per_class) {
    avg.precision += c.precision;
    avg.recall += c.recall;
    avg.f1 += c.f1;
  }
  const double k = static_cast<double>(per_class.size());
  avg.precision /= k;
  avg.recall /= k;
  avg.f1 /= k;
  return avg;
}

std::vector<Misclassification> error_report(std::span<const TweetExample> examples, std::span<const int> predictions) {
  if (examples.size() != predictions.size()) throw ContractError("examples and predictions differ in length");
  std::vector<Misclassification> out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (!ex.label) throw ContractError("example '" + ex.uid + "' has no gold label");
    if (*ex.label != predictions[i]) out.push_back({ex.uid, *ex.label, predictions[i], detokenize(ex)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::pair(a.gold, a.predicted) < std::pair(b.gold, b.predicted);
  });
  return out;
}

EvalReport evaluate(std::span<const TweetExample> examples, std::span<const int> predictions) {
  EvalReport r;
  r.errors = error_report(examples, predictions);
  for (std::size_t i = 0; i < examples.size(); ++i) r.confusion.add(*examples[i].label, predictions[i]);
  r.per_class = class_metrics(r.confusion);
  r.weighted = weighted_metrics(r.confusion);
  r.macro = macro_metrics(r.confusion);
  r.accuracy = static_cast<double>(r.confusion.trace()) / static_cast<double>(r.confusion.total());
  return r;
}

nlohmann::json report_to_json(const EvalReport& report) {
  const int k = report.confusion.num_classes();
  nlohmann::json j;
  j["classes"] = nlohmann::json::array();
  j["confusion"] = nlohmann::json::array();
  for (int g = 0; g < k; ++g) {
    j["classes"].push_back(class_name(g));
    nlohmann::json row = nlohmann::json::array();
    for (int p = 0; p < k; ++p) row.push_back(report.confusion.at(g, p));
    j["confusion"].push_back(row);
  }
  j["per_class"] = nlohmann::json::array();
  for (const auto& c : report.per_class) {
    j["per_class"].push_back({{"precision", c.precision},
                              {"recall", c.recall},
                              {"f1", c.f1},
                              {"support", c.support},
                              {"degenerate", c.degenerate}});
  }
  j["weighted"] = averaged_json(report.weighted);
  j["macro"] = averaged_json(report.macro);
  j["accuracy"] = report.accuracy;
  j["errors"] = nlohmann::json::array();
  for (const auto& e : report.errors) {
    j["errors"].push_back({{"uid", e.uid}, {"gold", class_name(e.gold)}, {"pred", class_name(e.predicted)}});
  }
  return j;
}

std::string format_half_up(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  const double rounded = std::floor(value * scale + 0.5) / scale;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, rounded);
  return buf;
}

std::string render_report(const EvalReport& report, bool macro) {
  const int k = report.confusion.num_classes();
  std::ostringstream out;
  char buf[128];

  out << "Confusion matrix (rows: gold, columns: predicted)\n";
  std::snprintf(buf, sizeof buf, "%-10s", "");
  out << buf;
  for (int p = 0; p < k; ++p) {
    std::snprintf(buf, sizeof buf, "%10s", class_name(p).c_str());
    out << buf;
  }
  out << '\n';
  for (int g = 0; g < k; ++g) {
    std::snprintf(buf, sizeof buf, "%-10s", class_name(g).c_str());
    out << buf;
    for (int p = 0; p < k; ++p) {
      std::snprintf(buf, sizeof buf, "%10lld", static_cast<long long>(report.confusion.at(g, p)));
      out << buf;
    }
    out << '\n';
  }

  out << "\nClass-wise performance\n";
  std::snprintf(buf, sizeof buf, "%-10s%10s%10s%10s%10s\n", "", "precision", "recall", "f1", "support");
  out << buf;
  for (int c = 0; c < k; ++c) {
    const auto& m = report.per_class[c];
    std::snprintf(buf, sizeof buf, "%-10s%10s%10s%10s%10lld%s\n", class_name(c).c_str(),
                  format_half_up(m.precision, 2).c_str(), format_half_up(m.recall, 2).c_str(),
                  format_half_up(m.f1, 2).c_str(), static_cast<long long>(m.support),
                  m.degenerate ? "  (degenerate)" : "");
    out << buf;
  }

  out << '\n';
  std::snprintf(buf, sizeof buf, "%-10s%10s%10s%10s\n", "", "precision", "recall", "f1");
  out << buf;
  std::snprintf(buf, sizeof buf, "%-10s%10s%10s%10s\n", "weighted", format_half_up(report.weighted.precision, 4).c_str(),
                format_half_up(report.weighted.recall, 4).c_str(), format_half_up(report.weighted.f1, 4).c_str());
  out << buf;
  if (macro) {
    std::snprintf(buf, sizeof buf, "%-10s%10s%10s%10s\n", "macro", format_half_up(report.macro.precision, 4).c_str(),
                  format_half_up(report.macro.recall, 4).c_str(), format_half_up(report.macro.f1, 4).c_str());
    out << buf;
  }
  out << "accuracy  " << format_half_up(report.accuracy, 4) << '\n';
  return out.str();
}

std::string render_errors(const EvalReport& report) {
  std::ostringstream out;
  int last_gold = -1, last_pred = -1;
  for (const auto& e : report.errors) {
    if (e.gold != last_gold || e.predicted != last_pred) {
      out << "== gold " << class_name(e.gold) << ", predicted " << class_name(e.predicted) << '\n';
      last_gold = e.gold;
      last_pred = e.predicted;
    }
    out << e.uid << '\t' << e.text << '\n';
  }
  return out.str();
}

}  // namespace cmsa
