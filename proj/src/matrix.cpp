#include "netres/matrix.hpp"

#include <cmath>

namespace netres {

void solve_dense(Matrix a, Matrix& b) {
  if (!a.square() || a.rows != b.rows) {
    throw std::invalid_argument("solve_dense: dimension mismatch");
  }
  const std::size_t n = a.rows;
  const std::size_t m = b.cols;

  double scale = 0.0;
  for (double v : a.data) scale = std::max(scale, std::abs(v));
  const double tiny = std::max(scale, 1.0) * 1e-13;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) < tiny) {
      throw std::runtime_error("solve_dense: singular system");
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      for (std::size_t c = 0; c < m; ++c) std::swap(b(col, c), b(pivot, c));
    }
    const double inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      for (std::size_t c = 0; c < m; ++c) b(r, c) -= f * b(col, c);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    const double inv = 1.0 / a(col, col);
    for (std::size_t c = 0; c < m; ++c) {
      double acc = b(col, c);
      for (std::size_t k = col + 1; k < n; ++k) acc -= a(col, k) * b(k, c);
      b(col, c) = acc * inv;
    }
  }
}

}  // namespace netres
