#pragma once

// (v)h-torsion, deviation tensor and h-curvature of the Berwald connection.
//
//   Rhat^i_jk = delta_k N^i_j - delta_j N^i_k     (1,2), antisymmetric in j,k
//   H^i_k     = y^j Rhat^i_jk                     (1,1)
//   R^i_jkl   = d Rhat^i_jk / dy^l                (1,3), read as R(X_j, Y_k) Z_l
//   R_lowered(X, Y, Z, W) = g(R(X, Y) Z, W)       (0,4)
//
// With this sign choice the round sphere has positive flag curvature.

#include <cmath>

#include "finsler/berwald.hpp"
#include "finsler/frame.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

class CurvatureExpansion : public LocalExpansion {
 public:
  CurvatureExpansion(const FinslerMetric& metric, const SamplePoint& p, int order = kFullOrder)
      : LocalExpansion(metric, p, order) {
    const int n = dim();
    const auto& N = nonlinear_connection();
    rhat_ = Tensor<Jet>(n, {1, 2});
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) rhat_(i, j, k) = j == k ? Jet(0.0) : delta(N(i, j), k) - delta(N(i, k), j);
    deviation_ = contract_slot(rhat_, 1, y());
  }

  const Tensor<Jet>& vh_torsion() const noexcept { return rhat_; }
  const Tensor<Jet>& deviation() const noexcept { return deviation_; }
  /// R(X,Y)Z with the differentiation direction Z in the last slot.
  Tensor<Jet> h_curvature() const { return vertical(rhat_); }

 private:
  Tensor<Jet> rhat_, deviation_;
};

struct CurvatureBundle {
  TensorValue Rhat;       // (1,2)
  TensorValue R;          // (1,3)
  TensorValue H;          // (1,1)
  TensorValue R_lowered;  // (0,4)
};

inline TensorValue vh_torsion(const FinslerMetric& metric, const SamplePoint& p) {
  const CurvatureExpansion e(metric, p, 4);
  return {p, values(e.vh_torsion())};
}

inline TensorValue deviation(const FinslerMetric& metric, const SamplePoint& p) {
  const CurvatureExpansion e(metric, p, 4);
  return {p, values(e.deviation())};
}

inline CurvatureBundle h_curvature(const FinslerMetric& metric, const SamplePoint& p) {
  const CurvatureExpansion e(metric, p, 5);
  const auto R = values(e.h_curvature());
  const auto g = values(e.frame().g);
  return {{p, values(e.vh_torsion())}, {p, R}, {p, values(e.deviation())}, {p, lower_last(R, g)}};
}

/// Cyclic sum over the three covariant slots of the horizontal derivative of
/// Rhat (the horizontal derivative slot is the last one).
inline Tensor<double> bianchi_cyclic_sum(const CurvatureExpansion& e) {
  return cyclic_sum(values(e.horizontal(e.vh_torsion())), 1, 2, 3);
}

/// Frobenius norm of the Bianchi cyclic sum; zero for every Berwald connection.
inline double bianchi_residual(const FinslerMetric& metric, const SamplePoint& p) {
  const CurvatureExpansion e(metric, p, 5);
  return frobenius_norm(bianchi_cyclic_sum(e));
}

}  // namespace finsler
