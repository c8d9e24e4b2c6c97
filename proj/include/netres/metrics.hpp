#pragma once

// The three scores used to benchmark a reservoir: balanced accuracy and
// macro F1 over the whole series, and a filtered accuracy restricted to
// steps where the fixation channel is down.

#include <cstddef>
#include <span>
#include <vector>

namespace netres {

struct MetricReport {
  double balanced_accuracy = 0.0;
  double f1_macro = 0.0;
  double filtered_accuracy = 0.0;
  std::size_t n_steps = 0;
  std::size_t n_decision_steps = 0;

  bool operator==(const MetricReport&) const = default;
};

// Mean per-class recall over the classes present in y_true.
double balanced_accuracy(std::span<const int> y_true, std::span<const int> y_pred);

// Macro average of 2PR/(P+R) over classes present in y_true; a class with
// P + R = 0 contributes 0.
double f1_macro(std::span<const int> y_true, std::span<const int> y_pred);

// Plain accuracy over steps with fixation < 0.5. Throws when no such step
// exists.
double filtered_accuracy(std::span<const int> y_true, std::span<const int> y_pred,
                         std::span<const double> fixation);

MetricReport evaluate(std::span<const int> y_true, std::span<const int> y_pred,
                      std::span<const double> fixation);

}  // namespace netres
