#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "upscale/common.hpp"

namespace upscale {

/// Compressed-row square matrix with a presized pattern; entries are
/// accumulated through add(), so assembly order fixes the rounding.
struct CsrMatrix {
  int n = 0;
  std::vector<int> row_ptr;  // size n + 1
  std::vector<int> cols;     // sorted within each row
  std::vector<double> vals;

  static CsrMatrix from_pattern(const std::vector<std::vector<int>>& adjacency) {
    CsrMatrix a;
    a.n = static_cast<int>(adjacency.size());
    a.row_ptr.assign(a.n + 1, 0);
    for (int r = 0; r < a.n; ++r)
      a.row_ptr[r + 1] =
          a.row_ptr[r] + static_cast<int>(adjacency[r].size());
    a.cols.reserve(a.row_ptr[a.n]);
    for (const auto& row : adjacency)
      a.cols.insert(a.cols.end(), row.begin(), row.end());
    a.vals.assign(a.cols.size(), 0.0);
    return a;
  }

  int find(int row, int col) const {
    const int lo = row_ptr[row], hi = row_ptr[row + 1];
    auto it = std::lower_bound(cols.begin() + lo, cols.begin() + hi, col);
    if (it == cols.begin() + hi || *it != col) return -1;
    return static_cast<int>(it - cols.begin());
  }

  void add(int row, int col, double v) {
    const int k = find(row, col);
    if (k < 0) throw DataError("CsrMatrix::add: entry outside pattern");
    vals[static_cast<std::size_t>(k)] += v;
  }

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    for (int r = 0; r < n; ++r) {
      double sum = 0.0;
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
        sum += vals[static_cast<std::size_t>(k)] *
               x[static_cast<std::size_t>(cols[static_cast<std::size_t>(k)])];
      y[static_cast<std::size_t>(r)] = sum;
    }
  }

  bool is_symmetric(double tol) const {
    for (int r = 0; r < n; ++r)
      for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        const int c = cols[static_cast<std::size_t>(k)];
        const int kt = find(c, r);
        const double v = vals[static_cast<std::size_t>(k)];
        const double vt = kt < 0 ? 0.0 : vals[static_cast<std::size_t>(kt)];
        if (std::abs(v - vt) > tol * std::max(1.0, std::abs(v))) return false;
      }
    return true;
  }
};

/// Symmetric sparse system (matrix plus right-hand side).
struct SparseSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
};

struct CgOptions {
  double rel_tol = 1e-10;
  int max_iterations_per_unknown = 10;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients with Jacobi preconditioning; converges when
/// ||r||_2 <= rel_tol ||b||_2.  Throws NumericalError with the residual
/// history if the iteration cap (10x unknowns by default) is hit.
inline CgResult solve_cg_jacobi(const CsrMatrix& a,
                                const std::vector<double>& b,
                                const CgOptions& opt = {}) {
  const int n = a.n;
  CgResult res;
  res.x.assign(n, 0.0);
  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return res;

  std::vector<double> inv_diag(n, 1.0);
  for (int r = 0; r < n; ++r) {
    const int k = a.find(r, r);
    const double d = k < 0 ? 0.0 : a.vals[static_cast<std::size_t>(k)];
    if (d <= 0.0)
      throw NumericalError("solve_cg_jacobi: nonpositive diagonal at row " +
                           std::to_string(r));
    inv_diag[static_cast<std::size_t>(r)] = 1.0 / d;
  }

  std::vector<double> r = b;
  std::vector<double> z(n), p(n), q(n);
  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = 0.0;
  for (int i = 0; i < n; ++i) rz += r[i] * z[i];

  const int cap = opt.max_iterations_per_unknown * n;
  std::vector<double> history;
  double rnorm = bnorm;
  for (int it = 1; it <= cap; ++it) {
    a.multiply(p, q);
    double pq = 0.0;
    for (int i = 0; i < n; ++i) pq += p[i] * q[i];
    if (pq <= 0.0)
      throw NumericalError("solve_cg_jacobi: matrix is not positive definite");
    const double alpha = rz / pq;
    for (int i = 0; i < n; ++i) res.x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * q[i];
    rnorm = 0.0;
    for (int i = 0; i < n; ++i) rnorm += r[i] * r[i];
    rnorm = std::sqrt(rnorm);
    history.push_back(rnorm / bnorm);
    if (rnorm <= opt.rel_tol * bnorm) {
      res.iterations = it;
      res.relative_residual = rnorm / bnorm;
      return res;
    }
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    double rz_new = 0.0;
    for (int i = 0; i < n; ++i) rz_new += r[i] * z[i];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  std::string msg = "solve_cg_jacobi: no convergence in " +
                    std::to_string(cap) + " iterations; relative residual " +
                    format_real(rnorm / bnorm) + "; history tail:";
  const std::size_t tail = std::min<std::size_t>(history.size(), 8);
  for (std::size_t i = history.size() - tail; i < history.size(); ++i)
    msg += ' ' + format_real(history[i]);
  throw NumericalError(msg);
}

}  // namespace upscale
