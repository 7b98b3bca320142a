#pragma once

// Structural tensors of a Finsler metric at a point: L, g, g^-1, the
// normalized supporting form ell, the indicatrix projector phi and the angular
// metric hbar, together with the projection operator built from phi.

#include <cmath>
#include <span>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/jet.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"
#include "finsler/sample.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

/// A double-valued tensor anchored at the sample point it was computed at.
class TensorValue : public Tensor<double> {
 public:
  TensorValue() = default;
  TensorValue(SamplePoint base, Tensor<double> t) : Tensor<double>(std::move(t)), base_(std::move(base)) {}
  const SamplePoint& base() const noexcept { return base_; }

 private:
  SamplePoint base_;
};

/// Frame quantities over a generic scalar (double values or jet fields).
template <class S>
struct FrameOf {
  S L;
  Tensor<S> g;      // (0,2)
  Tensor<S> g_inv;  // (2,0)
  Tensor<S> ell;    // (0,1)
  Tensor<S> phi;    // (1,1)
  Tensor<S> hbar;   // (0,2)
};

/// ell_i = g_ij y^j / L, phi^i_j = delta^i_j - y^i ell_j / L, hbar = g - ell (x) ell.
template <class S>
FrameOf<S> assemble_frame(const S& L, const Tensor<S>& g, const Tensor<S>& g_inv, std::span<const S> y) {
  const int n = g.dim();
  FrameOf<S> f{L, g, g_inv, Tensor<S>(n, {0, 1}, S{0.0}), Tensor<S>(n, {1, 1}, S{0.0}), Tensor<S>(n, {0, 2}, S{0.0})};
  const S inv_L = S{1.0} / L;
  for (int i = 0; i < n; ++i) {
    S acc{0.0};
    for (int j = 0; j < n; ++j) acc += g(i, j) * y[static_cast<std::size_t>(j)];
    f.ell(i) = acc * inv_L;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      f.phi(i, j) = S{i == j ? 1.0 : 0.0} - y[static_cast<std::size_t>(i)] * f.ell(j) * inv_L;
      f.hbar(i, j) = g(i, j) - f.ell(i) * f.ell(j);
    }
  return f;
}

/// The indicatrix projection: phi applied to every slot (and to the output
/// slot of a (1,p) tensor). Only (0,p) and (1,p) tensors are accepted.
template <class S>
Tensor<S> project(const Tensor<S>& w, const Tensor<S>& phi) {
  if (w.signature().contravariant > 1)
    throw RankError("indicatrix projection needs a (0,p) or (1,p) tensor, got " + to_string(w.signature()));
  Tensor<S> out = w;
  for (int s = 0; s < w.rank(); ++s) out = apply_to_slot(out, s, phi);
  return out;
}

struct StructuralFrame {
  SamplePoint point;
  double L = 0.0;
  TensorValue g, g_inv, ell, phi, hbar;
};

inline StructuralFrame to_structural_frame(const SamplePoint& p, const FrameOf<double>& f) {
  return {p, f.L, {p, f.g}, {p, f.g_inv}, {p, f.ell}, {p, f.phi}, {p, f.hbar}};
}

/// g_ij = d^2(L^2/2)/dy^i dy^j and the derived frame at p.
inline StructuralFrame structural_frame(const FinslerMetric& metric, const SamplePoint& p) {
  metric.require_valid(p);
  const int n = metric.dim();
  const JetSpace& space = JetSpace::get(n, 2);
  std::vector<Jet> x(p.x.begin(), p.x.end()), y;
  for (int i = 0; i < n; ++i) y.push_back(Jet::variable(space, i, p.y[static_cast<std::size_t>(i)]));
  const Jet L = metric.L(std::span<const Jet>(x), std::span<const Jet>(y));
  if (!(L.value() > 0.0)) throw DegenerateMetric(metric.name + ": L must be positive at " + describe(p), 0.0);
  const Jet E = 0.5 * L * L;
  Tensor<double> g(n, {0, 2});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = E.partial(i).partial(j).value();
  require_positive_definite(g, metric.name + " at " + describe(p));
  const Tensor<double> g_inv = invert(g, {2, 0});
  return to_structural_frame(p, assemble_frame<double>(L.value(), g, g_inv, p.y));
}

inline TensorValue indicatrix_project(const TensorValue& w, const StructuralFrame& frame) {
  return {w.base(), project<double>(w, frame.phi)};
}

inline TensorValue antisymmetrize(const TensorValue& w, int slot_a, int slot_b) {
  return {w.base(), antisymmetrize<double>(w, slot_a, slot_b)};
}

inline TensorValue cyclic_sum(const TensorValue& w, int a, int b, int c) {
  return {w.base(), cyclic_sum<double>(w, a, b, c)};
}

/// True when contracting any covariant slot with y (and any contravariant slot
/// with ell) gives at most tol * |w| * |y|.
inline bool is_indicatory(const Tensor<double>& w, const StructuralFrame& frame, double tol = 1e-8) {
  const double scale = frobenius_norm(w);
  double ynorm = 0.0;
  for (double v : frame.point.y) ynorm += v * v;
  ynorm = std::sqrt(ynorm);
  const std::span<const double> y(frame.point.y);
  for (int s = 0; s < w.rank(); ++s) {
    const Tensor<double> c = s < w.signature().contravariant ? contract_slot(w, s, frame.ell.data())
                                                             : contract_slot(w, s, y);
    if (frobenius_norm(c) > tol * scale * ynorm) return false;
  }
  return true;
}

}  // namespace finsler
