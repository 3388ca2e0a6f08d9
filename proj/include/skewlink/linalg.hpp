#ifndef SKEWLINK_LINALG_HPP
#define SKEWLINK_LINALG_HPP

// Small dense linear algebra for parameter-sized matrices (a handful of rows).

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace skewlink {

using Matrix = std::vector<std::vector<double>>;

inline Matrix identity_matrix(std::size_t n) {
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

/// Numerical rank by Gaussian elimination with full pivoting.
inline std::size_t matrix_rank(Matrix a, std::size_t n_cols, double rel_tol = 1e-10) {
  const std::size_t n_rows = a.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return 0;
  const double tol = rel_tol * scale * static_cast<double>(std::max(n_rows, n_cols));

  std::vector<std::size_t> cols(n_cols);
  for (std::size_t j = 0; j < n_cols; ++j) cols[j] = j;
  std::size_t rank = 0;
  for (std::size_t k = 0; k < std::min(n_rows, n_cols); ++k) {
    std::size_t pr = k, pc = k;
    double best = 0.0;
    for (std::size_t i = k; i < n_rows; ++i)
      for (std::size_t j = k; j < n_cols; ++j)
        if (std::fabs(a[i][cols[j]]) > best) {
          best = std::fabs(a[i][cols[j]]);
          pr = i;
          pc = j;
        }
    if (best <= tol) break;
    std::swap(a[k], a[pr]);
    std::swap(cols[k], cols[pc]);
    for (std::size_t i = k + 1; i < n_rows; ++i) {
      const double f = a[i][cols[k]] / a[k][cols[k]];
      for (std::size_t j = k; j < n_cols; ++j) a[i][cols[j]] -= f * a[k][cols[j]];
    }
    ++rank;
  }
  return rank;
}

inline double norm1(const Matrix& a) {
  double best = 0.0;
  const std::size_t n = a.empty() ? 0 : a[0].size();
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (const auto& row : a) s += std::fabs(row[j]);
    best = std::max(best, s);
  }
  return best;
}

/// Lower Cholesky factor of a symmetric positive-definite matrix, or nullopt.
inline std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix l(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

/// Inverse of a symmetric positive-definite matrix via Cholesky, or nullopt.
inline std::optional<Matrix> spd_inverse(const Matrix& a) {
  const auto l = cholesky(a);
  if (!l) return std::nullopt;
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    // Solve L y = e_c, then L^T x = y.
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = i == c ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= (*l)[i][k] * y[k];
      y[i] = s / (*l)[i][i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t k = ii + 1; k < n; ++k) s -= (*l)[k][ii] * inv[k][c];
      inv[ii][c] = s / (*l)[ii][ii];
    }
  }
  return inv;
}

}  // namespace skewlink

#endif  // SKEWLINK_LINALG_HPP
