#include "netres/readout.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace netres {

ReadoutModel train_readout(const Matrix& features, const std::vector<int>& labels,
                           double lambda) {
  if (features.rows != labels.size()) {
    throw std::invalid_argument("train_readout: feature/label length mismatch");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("train_readout: lambda must be >= 0");
  const std::size_t f = features.cols;
  if (features.rows <= f) {
    throw std::runtime_error("train_readout: need more rows than features");
  }

  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw std::runtime_error("train_readout: need at least 2 distinct labels");
  }
  std::vector<int> classes(distinct.begin(), distinct.end());
  std::vector<std::size_t> class_pos(labels.size());
  for (std::size_t t = 0; t < labels.size(); ++t) {
    class_pos[t] = static_cast<std::size_t>(
        std::lower_bound(classes.begin(), classes.end(), labels[t]) - classes.begin());
  }

  // Normal equations over the bias-augmented features: A = X^T X + lambda I
  // (bias unregularized), B = X^T Y.
  const std::size_t d = f + 1;
  const std::size_t c = classes.size();
  Matrix a(d, d);
  Matrix b(d, c);
  std::vector<double> xrow(d);
  for (std::size_t t = 0; t < features.rows; ++t) {
    for (std::size_t j = 0; j < f; ++j) xrow[j] = features(t, j);
    xrow[f] = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) a(i, j) += xrow[i] * xrow[j];
    }
    for (std::size_t i = 0; i < d; ++i) b(i, class_pos[t]) += xrow[i];
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i);
  }
  for (std::size_t i = 0; i < f; ++i) a(i, i) += lambda;

  try {
    solve_dense(a, b);  // b becomes W^T, (F+1) x C
  } catch (const std::runtime_error&) {
    if (lambda == 0.0) {
      throw std::runtime_error(
          "train_readout: singular system with lambda = 0; use lambda > 0");
    }
    throw;
  }

  ReadoutModel m;
  m.lambda = lambda;
  m.classes = std::move(classes);
  m.weights = Matrix(c, d);
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < d; ++j) m.weights(i, j) = b(j, i);
  }
  return m;
}

std::vector<int> predict(const ReadoutModel& m, const Matrix& features) {
  if (features.cols != m.feature_count()) {
    throw std::invalid_argument("predict: expected " + std::to_string(m.feature_count()) +
                                " features, got " + std::to_string(features.cols));
  }
  std::vector<int> out(features.rows);
  for (std::size_t t = 0; t < features.rows; ++t) {
    double best_score = 0.0;
    std::size_t best = 0;
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
      double score = m.weights(c, features.cols);  // bias
      for (std::size_t j = 0; j < features.cols; ++j) {
        score += m.weights(c, j) * features(t, j);
      }
      if (c == 0 || score > best_score) {
        best_score = score;
        best = c;
      }
    }
    out[t] = m.classes[best];
  }
  return out;
}

std::string readout_to_json(const ReadoutModel& m) {
  nlohmann::ordered_json j;
  j["lambda"] = m.lambda;
  j["classes"] = m.classes;
  std::vector<std::vector<double>> rows(m.weights.rows);
  for (std::size_t i = 0; i < m.weights.rows; ++i) {
    rows[i].assign(m.weights.row(i), m.weights.row(i) + m.weights.cols);
  }
  j["weights"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace netres
