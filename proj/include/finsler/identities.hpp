#pragma once

// Identity suites evaluated on the values gathered at one sample point.
// Every check is reported as a normalized residual
//     |lhs - rhs|_F / max(|lhs|_F, |rhs|_F, floor)
// where the floor keeps identities whose both sides vanish (constant
// curvature, flat space) from dividing rounding noise by rounding noise.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/frame.hpp"
#include "finsler/point_data.hpp"
#include "finsler/scalar_class.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

struct Tolerances {
  double structural = 1e-7;  // frame identities and P.F = B/3
  double curvature = 1e-6;   // curvature identities
  double isotropy = 1e-7;    // H = k L^2 phi
  double vanishing = 1e-7;   // |C|, |B|, |A|, |P.R|, |P.N| treated as zero
  double k_spread = 1e-6;    // stdev(k) / (1 + |mean k|) for constant curvature

  static Tolerances defaults(Backend b) {
    if (b == Backend::jet) return {};
    return {1e-3, 1e-3, 1e-3, 1e-3, 1e-4};
  }

  /// Applies a named override; unknown names are configuration errors.
  void set(const std::string& name, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("tolerance '" + name + "' must be positive");
    if (name == "structural") structural = value;
    else if (name == "curvature") curvature = value;
    else if (name == "isotropy") isotropy = value;
    else if (name == "vanishing") vanishing = value;
    else if (name == "k_spread") k_spread = value;
    else throw ConfigError("unknown tolerance '" + name + "'");
  }
};

struct IdentityCheck {
  std::string suite;
  std::string key;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return residual < tolerance; }
};

inline double normalized_residual(const Tensor<double>& lhs, const Tensor<double>& rhs, double floor) {
  const double scale = std::max({frobenius_norm(lhs), frobenius_norm(rhs), floor});
  return scale > 0.0 ? frobenius_norm(lhs - rhs) / scale : 0.0;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemma21",     "lemma22", "lemma23", "theorem21", "corollary21",
                                              "prop21",      "lemma31", "bianchi", "classify"};
  return names;
}

/// Suites the finite-difference analyzer can feed.
inline bool suite_supported(const std::string& suite, Backend b) {
  if (b == Backend::jet) return true;
  return suite == "lemma21" || suite == "bianchi" || suite == "classify";
}

namespace detail {

inline double euclid_norm(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

inline Tensor<double> scalar_tensor(int n, double v) {
  Tensor<double> t(n, {0, 0});
  t[0] = v;
  return t;
}

template <class F>
Tensor<double> build(int n, Signature sig, F&& fn) {
  Tensor<double> t(n, sig);
  t.for_each([&](std::span<const int> idx, double& v) { v = fn(idx); });
  return t;
}

class SuiteBuilder {
 public:
  SuiteBuilder(std::string suite, std::vector<IdentityCheck>& out) : suite_(std::move(suite)), out_(out) {}
  void add(const std::string& key, const Tensor<double>& lhs, const Tensor<double>& rhs, double floor, double tol) {
    out_.push_back({suite_, key, normalized_residual(lhs, rhs, floor), tol});
  }
  void add_value(const std::string& key, double residual, double tol) { out_.push_back({suite_, key, residual, tol}); }

 private:
  std::string suite_;
  std::vector<IdentityCheck>& out_;
};

inline const Tensor<double>& need(const std::optional<Tensor<double>>& t, const char* what) {
  if (!t) throw OrderUnsupported(std::string(what) + " is not available from this backend");
  return *t;
}

/// A(X,Y,Z) with the direction first, from the stored A_{YZX}.
inline Tensor<double> A_direction_first(const Tensor<double>& A) {
  return build(A.dim(), {0, 3}, [&](std::span<const int> i) { return A(i[1], i[2], i[0]); });
}

}  // namespace detail

// Frame identities: contractions with eta, parallelism of L and ell along
// horizontal directions, vertical derivatives of L, ell, phi, projection.
inline void suite_lemma21(const PointData& d, const Tolerances& tol, std::vector<IdentityCheck>& out) {
  detail::SuiteBuilder s("lemma21", out);
  const int n = d.dim();
  const auto& f = d.frame;
  const std::span<const double> y(d.point.y);
  const double ynorm = detail::euclid_norm(y);
  const double t = tol.structural;

  s.add("frame.ell_eta_equals_L", contract_slot(f.ell, 0, y), detail::scalar_tensor(n, f.L), f.L, t);
  s.add("frame.phi_eta_vanishes", contract_slot(f.phi, 1, y), Tensor<double>(n, {1, 0}),
        frobenius_norm(f.phi) * ynorm, t);
  s.add("frame.hbar_eta_vanishes", contract_slot(f.hbar, 1, y), Tensor<double>(n, {0, 1}),
        frobenius_norm(f.hbar) * ynorm, t);
  s.add("horizontal.L_parallel", d.h_dL, Tensor<double>(n, {0, 1}), f.L, t);
  s.add("horizontal.ell_parallel", d.h_dell, Tensor<double>(n, {0, 2}), frobenius_norm(f.ell), t);
  s.add("vertical.L_gives_ell", d.v_dL, f.ell, 0.0, t);
  s.add("vertical.ell_gives_hbar_over_L", d.v_dell, f.hbar * (1.0 / f.L), 0.0, t);
  const Tensor<double> dphi = detail::build(n, {1, 2}, [&](std::span<const int> i) {
    const int a = i[0], k = i[1], l = i[2];
    return -(f.hbar(k, l) * y[static_cast<std::size_t>(a)] + f.L * f.phi(a, l) * f.ell(k)) / (f.L * f.L);
  });
  s.add("vertical.phi_derivative", d.v_dphi, dphi, 0.0, t);
  s.add("projection.ell_annihilated", project(f.ell, f.phi), Tensor<double>(n, {0, 1}), frobenius_norm(f.ell), t);
  s.add("projection.hbar_preserved", project(f.hbar, f.phi), f.hbar, 0.0, t);
}

// Properties of C = L dk/dy.
inline void suite_lemma22(const PointData& d, const Tolerances& tol, std::vector<IdentityCheck>& out) {
  detail::SuiteBuilder s("lemma22", out);
  const int n = d.dim();
  const std::span<const double> y(d.point.y);
  const double ynorm = detail::euclid_norm(y);
  const double floor = 1.0 + std::abs(d.k);
  const auto& dC = detail::need(d.dC, "vertical derivative of C");
  const double t = tol.curvature;

  s.add("C.eta_contraction_vanishes", contract_slot(d.C, 0, y), detail::scalar_tensor(n, 0.0),
        std::max(frobenius_norm(d.C) * ynorm, floor * d.frame.L), t);
  s.add("C.indicatory", project(d.C, d.frame.phi), d.C, floor, t);
  s.add("C.vertical_derivative_along_eta_vanishes", contract_slot(dC, 1, y), Tensor<double>(n, {0, 1}),
        std::max(frobenius_norm(dC) * ynorm, floor), t);
  s.add("C.vertical_derivative_in_eta_slot", contract_slot(dC, 0, y), d.C * -1.0, floor, t);
}

// Properties of B = L P(dC).
inline void suite_lemma23(const PointData& d, const Tolerances& tol, std::vector<IdentityCheck>& out) {
  detail::SuiteBuilder s("lemma23", out);
  const int n = d.dim();
  const std::span<const double> y(d.point.y);
  const double ynorm = detail::euclid_norm(y);
  const double floor = 1.0 + std::abs(d.k);
  const auto& B = detail::need(d.B, "B");
  const auto& dC = detail::need(d.dC, "vertical derivative of C");
  const auto& dB = detail::need(d.dB, "vertical derivative of B");
  const auto& f = d.frame;
  const double t = tol.curvature;

  s.add("B.eta_contraction_vanishes", contract_slot(B, 0, y), Tensor<double>(n, {0, 1}),
        std::max(frobenius_norm(B) * ynorm, floor * f.L), t);
  s.add("B.indicatory", project(B, f.phi), B, floor, t);
  s.add("B.vertical_derivative_along_eta_vanishes", contract_slot(dB, 2, y), Tensor<double>(n, {0, 2}),
        std::max(frobenius_norm(dB) * ynorm, floor), t);
  const Tensor<double> from_C =
      detail::build(n, {0, 2}, [&](std::span<const int> i) { return f.L * dC(i[1], i[0]) + d.C(i[0]) * f.ell(i[1]); });
  s.add("B.from_vertical_derivative_of_C", B, from_C, floor, t);
  s.add("B.symmetric", B, swap_slots(B, 0, 1), floor, t);
  // (D2 B)(X, eta, Y) and (D2 B)(X, Y, eta), direction first; stored dB_{ab c}
  // carries the direction in c.
  const Tensor<double> minus_B_swapped = swap_slots(B, 0, 1) * -1.0;
  s.add("B.vertical_derivative_eta_in_middle", contract_slot(dB, 0, y), minus_B_swapped, floor, t);
  s.add("B.vertical_derivative_eta_last", contract_slot(dB, 1, y), minus_B_swapped, floor, t);
}

// Universal curvature identities and the scalar-curvature forms of Rhat and R.
inline void suite_theorem21(const PointData& d, const Tolerances& tol, std::vector<IdentityCheck>& out) {
  detail::SuiteBuilder s("theorem21", out);
  const int n = d.dim();
  const auto& f = d.frame;
  const std::span<const double> y(d.point.y);
  const double L = f.L, k = d.k;
  const double floor = (1.0 + std::abs(k)) * L;
  const double t = tol.curvature;

  const Tensor<double> from_H = detail::build(n, {1, 2}, [&](std::span<const int> i) {
    return (d.v_dH(i[0], i[2], i[1]) - d.v_dH(i[0], i[1], i[2])) / 3.0;
  });
  s.add("torsion.reconstruction_from_deviation", d.rhat, from_H, floor, t);
  s.add("curvature.eta_contraction_gives_torsion", contract_slot(d.h_curvature, 3, y), d.rhat, floor, t);

  // Rhat^i_jk = L (k l_j + C_j/3) phi^i_k - (j <-> k)
  const Tensor<double> eq1 = detail::build(n, {1, 2}, [&](std::span<const int> i) {
    const int a = i[0], j = i[1], kk = i[2];
    return L * ((k * f.ell(j) + d.C(j) / 3.0) * f.phi(a, kk) - (k * f.ell(kk) + d.C(kk) / 3.0) * f.phi(a, j));
  });
  s.add("torsion.scalar_curvature_form", d.rhat, eq1, floor, t);

  if (d.B) {
    const auto& B = *d.B;
    // R^i_jkl = Alt_{j,k} { phi^i_k [k l_j l_l + C_j l_l/3 + 2 l_j C_l/3 + k hbar_jl + B_jl/3]
    //                       - (k l_j + C_j/3) hbar_kl y^i / L - C_j l_k phi^i_l / 3 }
    auto term = [&](int a, int j, int kk, int l) {
      return f.phi(a, kk) * (k * f.ell(j) * f.ell(l) + d.C(j) * f.ell(l) / 3.0 + 2.0 * f.ell(j) * d.C(l) / 3.0 +
                             k * f.hbar(j, l) + B(j, l) / 3.0) -
             (k * f.ell(j) + d.C(j) / 3.0) * f.hbar(kk, l) * y[static_cast<std::size_t>(a)] / L -
             d.C(j) * f.ell(kk) * f.phi(a, l) / 3.0;
    };
    const Tensor<double> form = detail::build(n, {1, 3}, [&](std::span<const int> i) {
      return term(i[0], i[1], i[2], i[3]) - term(i[0], i[2], i[1], i[3]);
    });
    s.add("curvature.scalar_curvature_form", d.h_curvature, form, 1.0 + std::abs(k), t);
  }
}

/// N and F built from k, g, ell, C and B at a point.
inline std::pair<Tensor<double>, Tensor<double>> tensors_NF(const PointData& d) {
  return tensor_NF(d.k, d.frame.g, d.frame.ell, d.C, detail::need(d.B, "B"));
}

// Symmetric and antisymmetric parts of R(X,Y,Z,W) in (Z,W), and P.F = B/3.
inline void suite_corollary21(const PointData& d, const Tolerances& tol, std::vector<IdentityCheck>& out) {
  detail::SuiteBuilder s("corollary21", out);
  const int n = d.dim();
  const auto& f = d.frame;
  const auto& R = d.h_curvature_lowered;
  const auto [N, F] = tensors_NF(d);
  const double floor = (1.0 + std::abs(d.k)) * f.L * f.L;

  const Tensor<double> rhs_a = detail::build(n, {0, 4}, [&](std::span<const int> i) {
    auto w = [&](int X, int Y, int Z, int W) { return f.hbar(Z, X) * N(W, Y) + f.hbar(W, Y) * N(Z, X); };
    return w(i[0], i[1], i[2], i[3]) - w(i[1], i[0], i[2], i[3]);
  });
  s.add("curvature.antisymmetric_in_last_pair", R - swap_slots(R, 2, 3), rhs_a, floor, tol.curvature);

  const Tensor<double> rhs_b = detail::build(n, {0, 4}, [&](std::span<const int> i) {
    auto w = [&](int X, int Y, int Z, int W) {
      return f.hbar(W, Y) * F(Z, X) + f.hbar(Z, Y) * F(W, X) + f.hbar(W, Z) * F(Y, X);
    };
    return w(i[0], i[1], i[2], i[3]) - w(i[1], i[0], i[2], i[3]);
  });
  s.add("curvature.symmetric_in_last_pair", R + swap_slots(R, 2, 3), rhs_b, floor, tol.curvature);

  s.add("F.projection_is_third_of_B", project(F, f.phi), *d.B * (1.0 / 3.0), 1.0 + std::abs(d.k), tol.structural);
}

struct ProjectionNorms {
  double PR = 0.0;  // |P.R| (lowered form)
  double PN = 0.0;  // |P.N|
};

inline ProjectionNorms projection_norms(const PointData& d) {
  const auto [N, F] = tensors_NF(d);
  return {frobenius_norm(project(d.h_curvature_lowered, d.frame.phi)), frobenius_norm(project(N, d.frame.phi))};
}

// Projected h-curvature and the equivalence P.R = 0 <=> P.N = 0.
inline void suite_prop21(const PointData& d, const Tolerances& tol, std::vector<IdentityCheck>& out) {
  detail::SuiteBuilder s("prop21", out);
  const int n = d.dim();
  const auto& f = d.frame;
  const auto& B = detail::need(d.B, "B");
  const Tensor<double> PR = project(d.h_curvature_lowered, f.phi);
  const Tensor<double> rhs = detail::build(n, {0, 4}, [&](std::span<const int> i) {
    auto w = [&](int X, int Y, int Z, int W) { return f.hbar(Y, W) * (B(Z, X) / 3.0 + d.k * f.hbar(Z, X)); };
    return w(i[0], i[1], i[2], i[3]) - w(i[1], i[0], i[2], i[3]);
  });
  s.add("curvature.projected_form", PR, rhs, (1.0 + std::abs(d.k)) * f.L * f.L, tol.curvature);
  const auto norms = projection_norms(d);
  const bool agree = (norms.PR < tol.vanishing) == (norms.PN < tol.vanishing);
  s.add_value("projection.curvature_vanishes_iff_N_vanishes", agree ? 0.0 : 1.0, 0.5);
}

// The A tensor: antisymmetrized identity with C and hbar, and its expansion
// through dB.
inline void suite_lemma31(const PointData& d, const Tolerances& tol, std::vector<IdentityCheck>& out) {
  detail::SuiteBuilder s("lemma31", out);
  const int n = d.dim();
  const auto& f = d.frame;
  const auto& B = detail::need(d.B, "B");
  const auto& dB = detail::need(d.dB, "vertical derivative of B");
  const Tensor<double> A = detail::A_direction_first(detail::need(d.A, "A"));
  const double floor = 1.0 + std::abs(d.k);

  const Tensor<double> T =
      detail::build(n, {0, 3}, [&](std::span<const int> i) { return A(i[0], i[1], i[2]) + d.C(i[0]) * f.hbar(i[1], i[2]); });
  s.add("A.antisymmetrized_with_C_hbar_vanishes", antisymmetrize(T, 0, 1), Tensor<double>(n, {0, 3}),
        std::max(frobenius_norm(T), floor), tol.curvature);

  const Tensor<double> expansion = detail::build(n, {0, 3}, [&](std::span<const int> i) {
    const int X = i[0], Y = i[1], Z = i[2];
    return f.L * dB(Y, Z, X) + f.ell(Z) * B(X, Y) + f.ell(Y) * B(X, Z);
  });
  s.add("A.expansion_through_dB", A, expansion, floor, tol.curvature);
}

// Cyclic identity for the horizontal derivative of Rhat; horizontal constancy
// of k wherever C vanishes.
inline void suite_bianchi(const PointData& d, const Tolerances& tol, std::vector<IdentityCheck>& out) {
  detail::SuiteBuilder s("bianchi", out);
  const int n = d.dim();
  const double floor = (1.0 + std::abs(d.k)) * d.frame.L;
  s.add("bianchi.cyclic_horizontal_torsion", cyclic_sum(d.h_dRhat, 1, 2, 3), Tensor<double>(n, {1, 3}),
        std::max(frobenius_norm(d.h_dRhat), floor), tol.curvature);
  if (frobenius_norm(d.C) < tol.vanishing)
    s.add("scalar.horizontal_k_constant", d.h_dk, Tensor<double>(n, {0, 1}), 1.0 + std::abs(d.k), tol.curvature);
}

/// Runs one named suite on a point. "classify" is a metric-level suite and is
/// handled by the caller.
inline void run_suite(const std::string& suite, const PointData& d, const Tolerances& tol,
                      std::vector<IdentityCheck>& out) {
  static const std::map<std::string, void (*)(const PointData&, const Tolerances&, std::vector<IdentityCheck>&)>
      table{{"lemma21", suite_lemma21}, {"lemma22", suite_lemma22},         {"lemma23", suite_lemma23},
            {"theorem21", suite_theorem21}, {"corollary21", suite_corollary21}, {"prop21", suite_prop21},
            {"lemma31", suite_lemma31}, {"bianchi", suite_bianchi}};
  const auto it = table.find(suite);
  if (it == table.end()) throw ConfigError("unknown suite '" + suite + "'");
  it->second(d, tol, out);
}

// ---------------------------------------------------------------------------
// Per-point entry points on a metric.
// ---------------------------------------------------------------------------

using ResidualMap = std::map<std::string, double>;

inline ResidualMap as_map(const std::vector<IdentityCheck>& checks) {
  ResidualMap m;
  for (const auto& c : checks) m[c.key] = c.residual;
  return m;
}

inline ResidualMap check_theorem21(const FinslerMetric& metric, const SamplePoint& p, const Tolerances& tol = {}) {
  std::vector<IdentityCheck> out;
  suite_theorem21(analyze_jet(metric, p), tol, out);
  return as_map(out);
}

inline ResidualMap check_corollary21(const FinslerMetric& metric, const SamplePoint& p, const Tolerances& tol = {}) {
  std::vector<IdentityCheck> out;
  suite_corollary21(analyze_jet(metric, p), tol, out);
  return as_map(out);
}

struct Prop21Result {
  double PR_norm = 0.0;
  double PN_norm = 0.0;
  double projected_form_residual = 0.0;
};

inline Prop21Result check_prop21(const FinslerMetric& metric, const SamplePoint& p, const Tolerances& tol = {}) {
  const PointData d = analyze_jet(metric, p);
  std::vector<IdentityCheck> out;
  suite_prop21(d, tol, out);
  const auto norms = projection_norms(d);
  return {norms.PR, norms.PN, out.front().residual};
}

inline ResidualMap check_lemma31(const FinslerMetric& metric, const SamplePoint& p, const Tolerances& tol = {}) {
  std::vector<IdentityCheck> out;
  suite_lemma31(analyze_jet(metric, p), tol, out);
  return as_map(out);
}

}  // namespace finsler
