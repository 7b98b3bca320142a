#pragma once

// Geodesic spray, Berwald nonlinear connection and Berwald connection
// coefficients, carried as Taylor expansions around a sample point so that the
// horizontal and vertical covariant derivatives can differentiate them again.
//
// Index conventions (used throughout the library):
//   spray           G^i                       (1,0)
//   nonlinear conn. N^i_j   = dG^i/dy^j       (1,1)
//   Berwald coeffs  Gamma^i_jk = d2G^i/dy^j dy^k (1,2)
//   delta_k         = d/dx^k - N^m_k d/dy^m
// A covariant derivative appends its differentiation slot LAST. Formulas that
// are usually written with the direction first, (D A)(X, Y...), therefore read
// here as (D A)_{Y... X}.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/frame.hpp"
#include "finsler/jet.hpp"
#include "finsler/linalg.hpp"
#include "finsler/metric.hpp"
#include "finsler/sample.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

/// Jet order needed for every quantity the library derives (the A tensor is
/// seven derivatives deep in the fundamental function).
inline constexpr int kFullOrder = 7;

/// A tensor field given by a closure over jet coordinates (x, y).
using TensorFieldFn = std::function<Tensor<Jet>(std::span<const Jet>, std::span<const Jet>)>;

class LocalExpansion {
 public:
  LocalExpansion(const FinslerMetric& metric, const SamplePoint& p, int order = kFullOrder)
      : metric_(&metric), point_(p), space_(&JetSpace::get(2 * metric.dim(), order)) {
    metric.require_valid(p);
    const int n = metric.dim();
    for (int i = 0; i < n; ++i) {
      x_.push_back(Jet::variable(*space_, i, p.x[static_cast<std::size_t>(i)]));
      y_.push_back(Jet::variable(*space_, n + i, p.y[static_cast<std::size_t>(i)]));
    }
    L_ = metric.L(std::span<const Jet>(x_), std::span<const Jet>(y_));
    if (!(L_.value() > 0.0))
      throw DegenerateMetric(metric.name + ": L must be positive at " + describe(p), 0.0);
    if (order < 2) return;

    const Jet E = 0.5 * L_ * L_;
    Tensor<Jet> g(n, {0, 2});
    Tensor<double> g0(n, {0, 2});
    std::vector<Jet> E_y;
    for (int i = 0; i < n; ++i) E_y.push_back(d_y(E, i));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        g(i, j) = d_y(E_y[static_cast<std::size_t>(i)], j);
        g0(i, j) = g(i, j).value();
      }
    require_positive_definite(g0, metric.name + " at " + describe(p));
    const Tensor<Jet> g_inv = invert(g, {2, 0});
    frame_ = assemble_frame<Jet>(L_, g, g_inv, y_);

    // G^i = 1/2 g^{ih} (y^k d2E/dy^h dx^k - dE/dx^h)
    spray_ = Tensor<Jet>(n, {1, 0}, Jet(0.0));
    std::vector<Jet> rhs;
    for (int h = 0; h < n; ++h) {
      Jet acc = -d_x(E, h);
      for (int k = 0; k < n; ++k) acc += y_[static_cast<std::size_t>(k)] * d_x(E_y[static_cast<std::size_t>(h)], k);
      rhs.push_back(acc);
    }
    for (int i = 0; i < n; ++i) {
      Jet acc(0.0);
      for (int h = 0; h < n; ++h) acc += g_inv(i, h) * rhs[static_cast<std::size_t>(h)];
      spray_(i) = 0.5 * acc;
    }
    if (order < 3) return;
    nonlinear_ = vertical(spray_);
    if (order < 4) return;
    berwald_ = vertical(nonlinear_);
  }

  const FinslerMetric& metric() const noexcept { return *metric_; }
  const SamplePoint& point() const noexcept { return point_; }
  const JetSpace& space() const noexcept { return *space_; }
  int order() const noexcept { return space_->max_order(); }
  int dim() const noexcept { return metric_->dim(); }

  std::span<const Jet> x() const noexcept { return x_; }
  std::span<const Jet> y() const noexcept { return y_; }

  const Jet& L() const noexcept { return L_; }
  const FrameOf<Jet>& frame() const { return need(frame_.g, 2, "metric tensor"), frame_; }
  const Tensor<Jet>& spray() const { return need(spray_, 2, "spray"); }
  const Tensor<Jet>& nonlinear_connection() const { return need(nonlinear_, 3, "nonlinear connection"); }
  const Tensor<Jet>& berwald_coefficients() const { return need(berwald_, 4, "Berwald coefficients"); }

  Jet d_x(const Jet& f, int k) const { return f.partial(k); }
  Jet d_y(const Jet& f, int k) const { return f.partial(dim() + k); }

  /// delta_k f = df/dx^k - N^m_k df/dy^m.
  Jet delta(const Jet& f, int k) const {
    const auto& N = nonlinear_connection();
    Jet out = d_x(f, k);
    for (int m = 0; m < dim(); ++m) out -= N(m, k) * d_y(f, m);
    return out;
  }

  /// Vertical covariant derivative: componentwise d/dy^j, slot appended last.
  Tensor<Jet> vertical(const Tensor<Jet>& t) const {
    const int n = dim();
    Signature sig = t.signature();
    ++sig.covariant;
    Tensor<Jet> out(n, sig);
    for (std::size_t a = 0; a < t.size(); ++a)
      for (int j = 0; j < n; ++j) out[a * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] = d_y(t[a], j);
    return out;
  }

  /// Horizontal covariant derivative: delta_j on components, +Gamma^i_{mj} T^m
  /// per contravariant slot, -Gamma^m_{aj} T_m per covariant slot; slot
  /// appended last.
  Tensor<Jet> horizontal(const Tensor<Jet>& t) const {
    const int n = dim();
    const auto& Gam = berwald_coefficients();
    Signature sig = t.signature();
    ++sig.covariant;
    Tensor<Jet> out(n, sig);
    std::vector<int> src(static_cast<std::size_t>(t.rank()));
    out.for_each([&](std::span<const int> idx, Jet& v) {
      const int j = idx.back();
      const auto base = idx.first(static_cast<std::size_t>(t.rank()));
      v = delta(t.at(base), j);
      for (int s = 0; s < t.rank(); ++s) {
        std::copy(base.begin(), base.end(), src.begin());
        const int a = base[static_cast<std::size_t>(s)];
        for (int m = 0; m < n; ++m) {
          src[static_cast<std::size_t>(s)] = m;
          if (s < t.signature().contravariant)
            v += Gam(a, m, j) * t.at(src);
          else
            v -= Gam(m, a, j) * t.at(src);
        }
      }
    });
    return out;
  }

  /// Expands a user-supplied field around the sample point.
  Tensor<Jet> expand(const TensorFieldFn& field) const { return field(x_, y_); }

 private:
  template <class T>
  const T& need(const T& t, int min_order, const char* what) const {
    if (order() < min_order)
      throw OrderUnsupported(std::string(what) + " needs a jet expansion of order >= " + std::to_string(min_order));
    return t;
  }

  const FinslerMetric* metric_;
  SamplePoint point_;
  const JetSpace* space_;
  std::vector<Jet> x_, y_;
  Jet L_;
  FrameOf<Jet> frame_;
  Tensor<Jet> spray_, nonlinear_, berwald_;
};

/// Point values of a jet tensor field.
inline Tensor<double> values(const Tensor<Jet>& t) {
  return map_components(t, [](const Jet& j) { return j.value(); });
}

inline FrameOf<double> values(const FrameOf<Jet>& f) {
  return {f.L.value(), values(f.g), values(f.g_inv), values(f.ell), values(f.phi), values(f.hbar)};
}

struct ConnectionData {
  TensorValue spray;          // G^i
  TensorValue nonlinear;      // N^i_j
  TensorValue berwald;        // Gamma^i_jk
};

/// Spray coefficients G^i at p.
inline TensorValue spray(const FinslerMetric& metric, const SamplePoint& p) {
  const LocalExpansion e(metric, p, 2);
  return {p, values(e.spray())};
}

inline ConnectionData connection(const FinslerMetric& metric, const SamplePoint& p) {
  const LocalExpansion e(metric, p, 4);
  return {{p, values(e.spray())}, {p, values(e.nonlinear_connection())}, {p, values(e.berwald_coefficients())}};
}

/// Horizontal covariant derivative of a field at p.
inline TensorValue h_cov_deriv(const FinslerMetric& metric, const TensorFieldFn& field, const SamplePoint& p) {
  const LocalExpansion e(metric, p, 4);
  return {p, values(e.horizontal(e.expand(field)))};
}

/// Vertical covariant derivative of a field at p. The metric only supplies the
/// dimension and chart: Berwald vertical coefficients vanish.
inline TensorValue v_cov_deriv(const FinslerMetric& metric, const TensorFieldFn& field, const SamplePoint& p) {
  const LocalExpansion e(metric, p, 1);
  return {p, values(e.vertical(e.expand(field)))};
}

}  // namespace finsler
