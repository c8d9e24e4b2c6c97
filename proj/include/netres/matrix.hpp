#pragma once

// Minimal dense row-major matrix. The numerics in this project are either
// tiny (7x7 readout systems) or sparse-in-practice (reservoir weights), so a
// plain buffer plus index arithmetic is all that is needed.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace netres {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }

  bool square() const { return rows == cols; }

  bool operator==(const Matrix&) const = default;
};

// Compressed sparse rows over the nonzero entries of a dense matrix. Used for
// the reservoir update and power iteration, where most entries are zero.
struct SparseView {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;  // n+1 offsets into cols/vals
  std::vector<std::size_t> cols;
  std::vector<double> vals;

  explicit SparseView(const Matrix& m) : n(m.rows), row_ptr(m.rows + 1, 0) {
    if (!m.square()) throw std::invalid_argument("SparseView: matrix must be square");
    for (std::size_t r = 0; r < m.rows; ++r) {
      row_ptr[r] = cols.size();
      const double* p = m.row(r);
      for (std::size_t c = 0; c < m.cols; ++c) {
        if (p[c] != 0.0) {
          cols.push_back(c);
          vals.push_back(p[c]);
        }
      }
    }
    row_ptr[m.rows] = cols.size();
  }

  // y = M x
  void multiply(const double* x, double* y) const {
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        acc += vals[k] * x[cols[k]];
      }
      y[r] = acc;
    }
  }

  // y = M^T x
  void multiply_transposed(const double* x, double* y) const {
    for (std::size_t r = 0; r < n; ++r) y[r] = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double xr = x[r];
      if (xr == 0.0) continue;
      for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        y[cols[k]] += vals[k] * xr;
      }
    }
  }
};

// Solves A X = B in place via Gaussian elimination with partial pivoting.
// A is n x n, B is n x m; the solution overwrites B. Throws on a singular
// pivot (relative to the largest coefficient magnitude).
void solve_dense(Matrix a, Matrix& b);

}  // namespace netres
