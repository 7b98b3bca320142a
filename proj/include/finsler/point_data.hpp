#pragma once

// Everything the verification suites need at one sample point, as plain
// values. The jet analyzer fills every field; the finite-difference analyzer
// leaves the deeper scalar ladder (dC, B, dB, A) empty.

#include <optional>
#include <string>

#include "finsler/berwald.hpp"
#include "finsler/curvature.hpp"
#include "finsler/frame.hpp"
#include "finsler/scalar_class.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

enum class Backend { jet, fd };

inline const char* to_string(Backend b) { return b == Backend::jet ? "jet" : "fd"; }

inline Backend parse_backend(const std::string& s) {
  if (s == "jet") return Backend::jet;
  if (s == "fd") return Backend::fd;
  throw ConfigError("unknown backend '" + s + "' (expected jet or fd)");
}

struct PointData {
  SamplePoint point;
  Backend backend = Backend::jet;

  FrameOf<double> frame;
  Tensor<double> spray, nonlinear, berwald;
  Tensor<double> rhat, deviation, h_curvature, h_curvature_lowered;
  double k = 0.0;
  Tensor<double> C;
  std::optional<Tensor<double>> dC, B, dB, A;

  // Derivatives consumed by the identity suites; the new slot is always last.
  Tensor<double> h_dL;     // horizontal derivative of L        (0,1)
  Tensor<double> h_dell;   // horizontal derivative of ell      (0,2)
  Tensor<double> v_dL;     // dL/dy                             (0,1)
  Tensor<double> v_dell;   // d ell/dy                          (0,2)
  Tensor<double> v_dphi;   // d phi/dy                          (1,2)
  Tensor<double> v_dH;     // dH/dy                             (1,2)
  Tensor<double> h_dRhat;  // horizontal derivative of Rhat     (1,3)
  Tensor<double> h_dk;     // horizontal derivative of k        (0,1)

  int dim() const noexcept { return point.dim(); }
  bool has_ladder() const noexcept { return B.has_value() && A.has_value(); }
};

inline Tensor<Jet> as_scalar_tensor(int n, const Jet& v) {
  Tensor<Jet> t(n, {0, 0});
  t[0] = v;
  return t;
}

inline PointData analyze_jet(const FinslerMetric& metric, const SamplePoint& p) {
  const ScalarExpansion e(metric, p, kFullOrder);
  const int n = e.dim();
  PointData d;
  d.point = p;
  d.backend = Backend::jet;
  d.frame = values(e.frame());
  d.spray = values(e.spray());
  d.nonlinear = values(e.nonlinear_connection());
  d.berwald = values(e.berwald_coefficients());
  d.rhat = values(e.vh_torsion());
  d.deviation = values(e.deviation());
  d.h_curvature = values(e.h_curvature());
  d.h_curvature_lowered = lower_last(d.h_curvature, d.frame.g);
  d.k = e.k().value();

  const Tensor<Jet> C = e.C();
  const Tensor<Jet> dC = e.vertical(C);
  const Tensor<Jet> B = project(dC, e.frame().phi) * e.L();
  const Tensor<Jet> dB = e.vertical(B);
  d.C = values(C);
  d.dC = values(dC);
  d.B = values(B);
  d.dB = values(dB);
  d.A = values(project(dB, e.frame().phi) * e.L());

  const Tensor<Jet> L = as_scalar_tensor(n, e.L());
  d.h_dL = values(e.horizontal(L));
  d.h_dell = values(e.horizontal(e.frame().ell));
  d.v_dL = values(e.vertical(L));
  d.v_dell = values(e.vertical(e.frame().ell));
  d.v_dphi = values(e.vertical(e.frame().phi));
  d.v_dH = values(e.vertical(e.deviation()));
  d.h_dRhat = values(e.horizontal(e.vh_torsion()));
  d.h_dk = values(e.horizontal(as_scalar_tensor(n, e.k())));
  return d;
}

}  // namespace finsler
