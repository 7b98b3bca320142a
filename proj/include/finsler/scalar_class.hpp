#pragma once

// The scalar curvature k = tr(H) / ((n-1) L^2) and its ladder of vertical
// derivatives:
//   C_a   = L dk/dy^a
//   B_ab  = L (P dC)_ab          with dC_ab = dC_a/dy^b
//   A_abc = L (P dB)_abc         with dB_abc = dB_ab/dy^c
// B is symmetric. Written with the direction first, the usual A(X,Y,Z) equals
// A_abc at (a,b,c) = (Y,Z,X).

#include <algorithm>
#include <cmath>

#include "finsler/curvature.hpp"
#include "finsler/error.hpp"
#include "finsler/frame.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

class ScalarExpansion : public CurvatureExpansion {
 public:
  ScalarExpansion(const FinslerMetric& metric, const SamplePoint& p, int order = kFullOrder)
      : CurvatureExpansion(metric, p, order) {
    const int n = dim();
    if (n < 2) throw DimensionTooSmall("scalar curvature needs dimension >= 2, got " + std::to_string(n));
    Jet trace(0.0);
    for (int i = 0; i < n; ++i) trace += deviation()(i, i);
    k_ = trace / (static_cast<double>(n - 1) * L() * L());
  }

  const Jet& k() const noexcept { return k_; }

  Tensor<Jet> C() const {
    need(5, "C");
    Tensor<Jet> c(dim(), {0, 1});
    for (int a = 0; a < dim(); ++a) c(a) = L() * d_y(k_, a);
    return c;
  }
  Tensor<Jet> dC() const { return need(6, "vertical derivative of C"), vertical(C()); }
  Tensor<Jet> B() const { return need(6, "B"), project(dC(), frame().phi) * L(); }
  Tensor<Jet> dB() const { return need(7, "vertical derivative of B"), vertical(B()); }
  Tensor<Jet> A() const { return need(7, "A"), project(dB(), frame().phi) * L(); }

 private:
  void need(int min_order, const char* what) const {
    if (order() < min_order)
      throw OrderUnsupported(std::string(what) + " needs a jet expansion of order >= " + std::to_string(min_order));
  }

  Jet k_;
};

struct ScalarData {
  double k = 0.0;
  TensorValue C, B, A, Ntensor, F;
};

inline double extract_k(const FinslerMetric& metric, const SamplePoint& p) {
  return ScalarExpansion(metric, p, 4).k().value();
}

/// |H - k L^2 phi|_F / max(|H|_F, L^2) with k from the trace.
inline double isotropy_residual(const Tensor<double>& H, double k, double L, const Tensor<double>& phi) {
  const double denom = std::max(frobenius_norm(H), L * L);
  return frobenius_norm(H - phi * (k * L * L)) / denom;
}

inline double isotropy_residual(const FinslerMetric& metric, const SamplePoint& p) {
  const ScalarExpansion e(metric, p, 4);
  return isotropy_residual(values(e.deviation()), e.k().value(), e.L().value(), values(e.frame().phi));
}

inline TensorValue tensor_C(const FinslerMetric& metric, const SamplePoint& p) {
  return {p, values(ScalarExpansion(metric, p, 5).C())};
}

inline TensorValue tensor_B(const FinslerMetric& metric, const SamplePoint& p) {
  return {p, values(ScalarExpansion(metric, p, 6).B())};
}

inline TensorValue tensor_A(const FinslerMetric& metric, const SamplePoint& p) {
  return {p, values(ScalarExpansion(metric, p, 7).A())};
}

/// N = k (g + l(x)l) + 1/3 (B + 2 l(x)C + 2 C(x)l),  F = 1/3 (B + 2 C(x)l).
inline std::pair<Tensor<double>, Tensor<double>> tensor_NF(double k, const Tensor<double>& g,
                                                           const Tensor<double>& ell, const Tensor<double>& C,
                                                           const Tensor<double>& B) {
  const Tensor<double> lC = outer(ell, C), Cl = outer(C, ell);
  Tensor<double> N = (g + outer(ell, ell)) * k + (B + lC * 2.0 + Cl * 2.0) * (1.0 / 3.0);
  Tensor<double> F = (B + Cl * 2.0) * (1.0 / 3.0);
  return {std::move(N), std::move(F)};
}

inline std::pair<TensorValue, TensorValue> tensor_NF(const FinslerMetric& metric, const SamplePoint& p) {
  const ScalarExpansion e(metric, p, 6);
  auto [N, F] = tensor_NF(e.k().value(), values(e.frame().g), values(e.frame().ell), values(e.C()), values(e.B()));
  return {{p, std::move(N)}, {p, std::move(F)}};
}

inline ScalarData scalar_data(const FinslerMetric& metric, const SamplePoint& p) {
  const ScalarExpansion e(metric, p, kFullOrder);
  const double k = e.k().value();
  const auto C = values(e.C());
  const auto B = values(e.B());
  auto [N, F] = tensor_NF(k, values(e.frame().g), values(e.frame().ell), C, B);
  return {k, {p, C}, {p, B}, {p, values(e.A())}, {p, std::move(N)}, {p, std::move(F)}};
}

}  // namespace finsler
