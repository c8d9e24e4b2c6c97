#include "netres/metrics.hpp"

#include <map>
#include <stdexcept>

namespace netres {

namespace {

void check_lengths(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.empty()) throw std::invalid_argument("metrics: empty label sequence");
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("metrics: length mismatch (" + std::to_string(y_true.size()) +
                                " vs " + std::to_string(y_pred.size()) + ")");
  }
}

struct ClassCounts {
  std::size_t actual = 0;     // occurrences in y_true
  std::size_t predicted = 0;  // occurrences in y_pred
  std::size_t correct = 0;    // matching positions
};

std::map<int, ClassCounts> count_classes(std::span<const int> y_true,
                                         std::span<const int> y_pred) {
  std::map<int, ClassCounts> counts;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    counts[y_true[i]].actual += 1;
    counts[y_pred[i]].predicted += 1;
    if (y_true[i] == y_pred[i]) counts[y_true[i]].correct += 1;
  }
  return counts;
}

}  // namespace

double balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  check_lengths(y_true, y_pred);
  const auto counts = count_classes(y_true, y_pred);
  double recall_sum = 0.0;
  std::size_t n_classes = 0;
  for (const auto& [cls, c] : counts) {
    if (c.actual == 0) continue;  // predicted-only class
    recall_sum += static_cast<double>(c.correct) / static_cast<double>(c.actual);
    ++n_classes;
  }
  return recall_sum / static_cast<double>(n_classes);
}

double f1_macro(std::span<const int> y_true, std::span<const int> y_pred) {
  check_lengths(y_true, y_pred);
  const auto counts = count_classes(y_true, y_pred);
  double f1_sum = 0.0;
  std::size_t n_classes = 0;
  for (const auto& [cls, c] : counts) {
    if (c.actual == 0) continue;
    // 2PR/(P+R) written as 2*correct/(predicted+actual); 0 when P+R = 0.
    const std::size_t denom = c.predicted + c.actual;
    f1_sum += denom == 0 ? 0.0
                         : 2.0 * static_cast<double>(c.correct) / static_cast<double>(denom);
    ++n_classes;
  }
  return f1_sum / static_cast<double>(n_classes);
}

double filtered_accuracy(std::span<const int> y_true, std::span<const int> y_pred,
                         std::span<const double> fixation) {
  check_lengths(y_true, y_pred);
  if (fixation.size() != y_true.size()) {
    throw std::invalid_argument("metrics: fixation length mismatch");
  }
  std::size_t considered = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (fixation[i] >= 0.5) continue;
    ++considered;
    if (y_true[i] == y_pred[i]) ++correct;
  }
  if (considered == 0) {
    throw std::runtime_error("filtered_accuracy: no steps with fixation below 0.5");
  }
  return static_cast<double>(correct) / static_cast<double>(considered);
}

MetricReport evaluate(std::span<const int> y_true, std::span<const int> y_pred,
                      std::span<const double> fixation) {
  MetricReport report;
  report.balanced_accuracy = balanced_accuracy(y_true, y_pred);
  report.f1_macro = f1_macro(y_true, y_pred);
  report.filtered_accuracy = filtered_accuracy(y_true, y_pred, fixation);
  report.n_steps = y_true.size();
  for (double f : fixation) {
    if (f < 0.5) ++report.n_decision_steps;
  }
  return report;
}

}  // namespace netres
