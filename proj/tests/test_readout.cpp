#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "netres/readout.hpp"
#include "netres/rng.hpp"
#include "test_util.hpp"

using namespace netres;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

struct RandomInstance {
  Matrix features;
  std::vector<int> labels;
};

RandomInstance random_instance(Rng& rng, std::size_t rows, std::size_t cols,
                               std::size_t classes) {
  RandomInstance inst{Matrix(rows, cols), {}};
  for (double& v : inst.features.data) v = rng.uniform(-1.0, 1.0);
  inst.labels.resize(rows);
  for (std::size_t t = 0; t < rows; ++t) {
    inst.labels[t] = static_cast<int>(rng.below(classes));
  }
  // make sure at least two classes appear
  inst.labels[0] = 0;
  inst.labels[1] = 1;
  return inst;
}

// inf-norm of (X^T X + lambda I~) W^T - X^T Y with the bias diagonal entry
// unregularized, evaluated straight from the definition
double normal_equation_residual(const Matrix& features, const std::vector<int>& labels,
                                const ReadoutModel& m) {
  const std::size_t t_rows = features.rows;
  const std::size_t d = features.cols + 1;
  const std::size_t c = m.classes.size();
  auto x_at = [&](std::size_t t, std::size_t j) {
    return j < features.cols ? features(t, j) : 1.0;
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      double lhs = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double a_ij = 0.0;
        for (std::size_t t = 0; t < t_rows; ++t) a_ij += x_at(t, i) * x_at(t, j);
        if (i == j && i < features.cols) a_ij += m.lambda;
        lhs += a_ij * m.weights(k, j);
      }
      double rhs = 0.0;
      for (std::size_t t = 0; t < t_rows; ++t) {
        if (labels[t] == m.classes[k]) rhs += x_at(t, i);
      }
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return worst;
}

double frobenius(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("train_readout: two points, one feature, lambda 0") {
  // X = [[1,1],[-1,1]] is invertible, so the fit is exact and the
  // predictions reproduce the training labels
  const Matrix features = from_rows({{1.0}, {-1.0}});
  const std::vector<int> labels = {1, 2};
  const ReadoutModel m = train_readout(features, labels, 0.0);
  REQUIRE(m.classes == std::vector<int>{1, 2});
  CHECK(predict(m, features) == labels);
  // hand solve: W^T = (X^T X)^-1 X^T Y = [[.5,-.5],[.5,.5]]
  CHECK(m.weights(0, 0) == doctest::Approx(0.5));
  CHECK(m.weights(0, 1) == doctest::Approx(0.5));
  CHECK(m.weights(1, 0) == doctest::Approx(-0.5));
  CHECK(m.weights(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("train_readout: huge lambda shrinks every non-bias weight away") {
  Rng rng(52);
  const RandomInstance inst = random_instance(rng, 60, 6, 3);
  const ReadoutModel m = train_readout(inst.features, inst.labels, 1e9);
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(m.weights(c, j)) < 1e-6);
  }
}

TEST_CASE("train_readout: row duplication leaves the lambda-0 solution unchanged") {
  Rng rng(53);
  const RandomInstance inst = random_instance(rng, 40, 4, 2);
  const ReadoutModel once = train_readout(inst.features, inst.labels, 0.0);

  Matrix doubled(80, 4);
  std::vector<int> doubled_labels(80);
  for (std::size_t t = 0; t < 40; ++t) {
    for (std::size_t j = 0; j < 4; ++j) {
      doubled(t, j) = inst.features(t, j);
      doubled(40 + t, j) = inst.features(t, j);
    }
    doubled_labels[t] = inst.labels[t];
    doubled_labels[40 + t] = inst.labels[t];
  }
  const ReadoutModel twice = train_readout(doubled, doubled_labels, 0.0);
  for (std::size_t i = 0; i < once.weights.data.size(); ++i) {
    CHECK(once.weights.data[i] == doctest::Approx(twice.weights.data[i]).epsilon(1e-9));
  }
}

TEST_CASE("train_readout: solution satisfies the normal equations") {
  Rng rng(54);
  for (int iter = 0; iter < 25; ++iter) {
    const RandomInstance inst = random_instance(rng, 30 + rng.below(100), 6, 2 + rng.below(3));
    const double lambda = 0.01 * std::pow(10.0, static_cast<double>(rng.below(4)));
    const ReadoutModel m = train_readout(inst.features, inst.labels, lambda);
    CHECK(normal_equation_residual(inst.features, inst.labels, m) < 1e-8);
  }
}

TEST_CASE("train_readout: matches an independent dense solver") {
  Rng rng(55);
  for (int iter = 0; iter < 10; ++iter) {
    const RandomInstance inst = random_instance(rng, 50, 6, 3);
    const double lambda = 0.5;
    const ReadoutModel m = train_readout(inst.features, inst.labels, lambda);

    const std::size_t d = 7;
    Eigen::MatrixXd x(inst.features.rows, d);
    for (std::size_t t = 0; t < inst.features.rows; ++t) {
      for (std::size_t j = 0; j < 6; ++j) x(t, j) = inst.features(t, j);
      x(t, 6) = 1.0;
    }
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(inst.features.rows, m.classes.size());
    for (std::size_t t = 0; t < inst.features.rows; ++t) {
      for (std::size_t k = 0; k < m.classes.size(); ++k) {
        if (inst.labels[t] == m.classes[k]) y(t, k) = 1.0;
      }
    }
    Eigen::MatrixXd reg = Eigen::MatrixXd::Identity(d, d) * lambda;
    reg(6, 6) = 0.0;
    const Eigen::MatrixXd wt = (x.transpose() * x + reg).fullPivLu().solve(x.transpose() * y);
    for (std::size_t k = 0; k < m.classes.size(); ++k) {
      for (std::size_t j = 0; j < d; ++j) {
        CHECK(m.weights(k, j) == doctest::Approx(wt(j, k)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("train_readout: Frobenius norm shrinks as lambda grows") {
  Rng rng(56);
  const RandomInstance inst = random_instance(rng, 80, 6, 3);
  double prev = 1e300;
  for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
    const double norm = frobenius(train_readout(inst.features, inst.labels, lambda).weights);
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("train_readout: error paths") {
  // duplicated feature column, lambda 0: singular
  const Matrix dup = from_rows({{1, 1}, {2, 2}, {3, 3}, {-1, -1}});
  CHECK_THROWS_WITH_AS(train_readout(dup, {0, 1, 0, 1}, 0.0),
                       doctest::Contains("lambda > 0"), std::runtime_error);
  CHECK_NOTHROW(train_readout(dup, {0, 1, 0, 1}, 0.5));

  const Matrix ok = from_rows({{1}, {2}, {3}});
  CHECK_THROWS_WITH_AS(train_readout(ok, {1, 1, 1}, 1.0),
                       doctest::Contains("distinct"), std::runtime_error);
  CHECK_THROWS_AS(train_readout(from_rows({{1}}), {1}, 1.0), std::runtime_error);
  CHECK_THROWS_AS(train_readout(ok, {1, 2}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(train_readout(ok, {1, 2, 1}, -0.5), std::invalid_argument);
}

TEST_CASE("predict") {
  SUBCASE("separable toy set is reproduced exactly") {
    Matrix features(30, 2);
    std::vector<int> labels(30);
    for (std::size_t t = 0; t < 30; ++t) {
      const int cls = static_cast<int>(t % 3);
      features(t, 0) = cls == 1 ? 1.0 : (cls == 2 ? -1.0 : 0.0);
      features(t, 1) = cls == 0 ? 1.0 : 0.0;
      labels[t] = cls;
    }
    const ReadoutModel m = train_readout(features, labels, 1e-6);
    CHECK(predict(m, features) == labels);
  }
  SUBCASE("all-zero features decode to the argmax of the bias column") {
    Matrix features(20, 3);
    Rng rng(57);
    std::vector<int> labels(20);
    for (std::size_t t = 0; t < 20; ++t) {
      for (std::size_t j = 0; j < 3; ++j) features(t, j) = rng.uniform(-1, 1);
      labels[t] = t < 14 ? 5 : 9;  // class 5 dominates
    }
    const ReadoutModel m = train_readout(features, labels, 10.0);
    std::size_t best = 0;
    for (std::size_t c = 1; c < m.classes.size(); ++c) {
      if (m.weights(c, 3) > m.weights(best, 3)) best = c;
    }
    const std::vector<int> pred = predict(m, Matrix(1, 3));
    CHECK(pred[0] == m.classes[best]);
  }
  SUBCASE("exact ties resolve to the smaller class") {
    ReadoutModel m;
    m.classes = {2, 7};
    m.weights = Matrix(2, 4);
    m.weights(0, 0) = 1.0;
    m.weights(1, 0) = 1.0;  // identical rows: scores always tie
    CHECK(predict(m, from_rows({{3.0, 0.0, 0.0}}))[0] == 2);
  }
  SUBCASE("width mismatch") {
    const ReadoutModel m = train_readout(from_rows({{1.0}, {-1.0}}), {1, 2}, 0.1);
    CHECK_THROWS_AS(predict(m, Matrix(5, 3)), std::invalid_argument);
  }
}

TEST_CASE("readout_to_json carries the model") {
  const ReadoutModel m = train_readout(from_rows({{1.0}, {-1.0}, {0.5}}), {1, 2, 1}, 0.25);
  const std::string json = readout_to_json(m);
  CHECK(json.find("\"lambda\": 0.25") != std::string::npos);
  CHECK(json.find("\"classes\"") != std::string::npos);
  CHECK(json.find("\"weights\"") != std::string::npos);
}
