#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <utility>

#include "finsler/error.hpp"
#include "finsler/jet.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

/// Inverse of a square matrix stored as a tensor of rank 2, by Gauss-Jordan
/// elimination with partial pivoting on the point values. Works unchanged on
/// jets, which yields the Taylor series of the inverse.
template <class S>
Tensor<S> invert(const Tensor<S>& m, Signature out_sig) {
  if (m.rank() != 2) throw RankError("invert: expects a rank-2 tensor");
  const int n = m.dim();
  Tensor<S> a = m;
  Tensor<S> inv(n, Signature{1, 1}, S{0.0});
  for (int i = 0; i < n; ++i) inv(i, i) = S{1.0};
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(value_of(a(r, col))) > std::abs(value_of(a(piv, col)))) piv = r;
    if (value_of(a(piv, col)) == 0.0) throw DegenerateMetric("invert: singular matrix", 0.0);
    if (piv != col)
      for (int c = 0; c < n; ++c) {
        std::swap(a(piv, c), a(col, c));
        std::swap(inv(piv, c), inv(col, c));
      }
    const S p = S{1.0} / a(col, col);
    for (int c = 0; c < n; ++c) {
      a(col, c) = a(col, c) * p;
      inv(col, c) = inv(col, c) * p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const S f = a(r, col);
      if (value_of(f) == 0.0 && !std::is_same_v<S, Jet>) continue;
      for (int c = 0; c < n; ++c) {
        a(r, c) = a(r, c) - f * a(col, c);
        inv(r, c) = inv(r, c) - f * inv(col, c);
      }
    }
  }
  Tensor<S> out(n, out_sig);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = inv[i];
  return out;
}

/// Extreme eigenvalues of the symmetric part of a rank-2 double tensor.
inline std::pair<double, double> eigen_range(const Tensor<double>& m) {
  const int n = m.dim();
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

/// Strong convexity test: min eigenvalue > 1e-9 * max eigenvalue.
inline void require_positive_definite(const Tensor<double>& g, const std::string& context) {
  const auto [lo, hi] = eigen_range(g);
  if (!(lo > 1e-9 * hi) || !(hi > 0.0))
    throw DegenerateMetric(context + ": fundamental tensor not positive definite (smallest eigenvalue " +
                               std::to_string(lo) + ", largest " + std::to_string(hi) + ")",
                           lo);
}

}  // namespace finsler
