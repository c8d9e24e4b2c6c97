#pragma once

// The one trained piece of the pipeline: a ridge-regression readout from
// output-node states to one-hot class targets, decoded by argmax.

#include <string>
#include <vector>

#include "netres/matrix.hpp"

namespace netres {

struct ReadoutModel {
  Matrix weights;            // C x (F+1); last column is the bias
  double lambda = 0.0;
  std::vector<int> classes;  // distinct training labels, ascending

  std::size_t feature_count() const { return weights.cols - 1; }
};

// Solves W = Y^T X (X^T X + lambda I)^-1 with X = [features | 1] and one-hot
// targets Y over the observed classes; the bias entry of the diagonal is not
// regularized. Requires rows > feature count and at least two distinct
// labels. A singular system with lambda = 0 raises an error suggesting
// lambda > 0.
ReadoutModel train_readout(const Matrix& features, const std::vector<int>& labels,
                           double lambda);

// Per-step argmax of the linear class scores; ties go to the smaller class
// value.
std::vector<int> predict(const ReadoutModel& m, const Matrix& features);

std::string readout_to_json(const ReadoutModel& m);

}  // namespace netres
