#pragma once

// Mixed x/y partial derivatives of scalar fields. Two independent backends:
// exact jets (jet_eval) and Richardson-extrapolated central differences
// (fd_eval), the latter serving as a cross-check oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric.hpp"
#include "finsler/sample.hpp"
#include "finsler/tensor.hpp"

namespace finsler {

struct JetRequest {
  const ScalarField* field = nullptr;
  SamplePoint point;
  int x_order = 0;
  int y_order = 0;
  /// Optional chart check applied to every evaluation point.
  const ChartDomain* domain = nullptr;
};

/// Order limits a backend can honour.
struct BackendLimits {
  int max_x = 0;
  int max_y = 0;
  int max_total = 0;
};

inline constexpr BackendLimits kJetLimits{2, 4, 6};
inline constexpr BackendLimits kFdLimits{3, 3, 3};

/// All partials d^a/dx^a d^b/dy^b with |a| <= x_order, |b| <= y_order, keyed
/// by the exponent vector (x exponents then y exponents), so permutations of
/// like-kind indices share one entry.
class JetResult {
 public:
  JetResult() = default;
  explicit JetResult(int dim) : dim_(dim) {}

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return values_.size(); }

  void set(std::vector<int> exps, double v) { values_[std::move(exps)] = v; }

  double at_exponents(const std::vector<int>& exps) const {
    auto it = values_.find(exps);
    if (it == values_.end()) throw OrderUnsupported("derivative not present in jet result");
    return it->second;
  }

  /// Derivative with respect to the listed x indices and y indices (0-based,
  /// in any order).
  double at(std::initializer_list<int> x_idx, std::initializer_list<int> y_idx) const {
    std::vector<int> e(static_cast<std::size_t>(2 * dim_), 0);
    for (int i : x_idx) ++e[static_cast<std::size_t>(i)];
    for (int i : y_idx) ++e[static_cast<std::size_t>(dim_ + i)];
    return at_exponents(e);
  }

  const std::map<std::vector<int>, double>& entries() const noexcept { return values_; }

 private:
  int dim_ = 0;
  std::map<std::vector<int>, double> values_;
};

namespace detail {

inline void check_request(const JetRequest& req, BackendLimits lim, const char* backend) {
  if (req.field == nullptr) throw OrderUnsupported(std::string(backend) + ": request without a field");
  if (req.x_order < 0 || req.y_order < 0 || req.x_order > lim.max_x || req.y_order > lim.max_y ||
      req.x_order + req.y_order > lim.max_total)
    throw OrderUnsupported(std::string(backend) + ": orders (x " + std::to_string(req.x_order) + ", y " +
                           std::to_string(req.y_order) + ") exceed backend limits (x " + std::to_string(lim.max_x) +
                           ", y " + std::to_string(lim.max_y) + ", total " + std::to_string(lim.max_total) + ")");
  if (req.point.dim() != req.field->dim) throw DomainError(std::string(backend) + ": point dimension mismatch");
}

// Exponent vectors with |x part| <= xo and |y part| <= yo.
inline std::vector<std::vector<int>> mixed_exponents(int n, int xo, int yo) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(2 * n), 0);
  std::function<void(int, int, int)> rec = [&](int pos, int xleft, int yleft) {
    if (pos == 2 * n) {
      out.push_back(e);
      return;
    }
    int& left = pos < n ? xleft : yleft;
    const int cap = left;
    for (int k = 0; k <= cap; ++k) {
      e[static_cast<std::size_t>(pos)] = k;
      left = cap - k;
      rec(pos + 1, xleft, yleft);
    }
    left = cap;
    e[static_cast<std::size_t>(pos)] = 0;
  };
  rec(0, xo, yo);
  return out;
}

}  // namespace detail

/// Exact mixed partials from a jet expansion of the field at the point.
inline JetResult jet_eval(const JetRequest& req) {
  detail::check_request(req, kJetLimits, "jet_eval");
  if (req.domain) {
    if (!req.domain->contains(req.point.x)) throw DomainError("jet_eval: point outside chart domain");
  }
  const int n = req.field->dim;
  const JetSpace& space = JetSpace::get(2 * n, req.x_order + req.y_order);
  std::vector<Jet> x, y;
  for (int i = 0; i < n; ++i) {
    x.push_back(Jet::variable(space, i, req.point.x[static_cast<std::size_t>(i)]));
    y.push_back(Jet::variable(space, n + i, req.point.y[static_cast<std::size_t>(i)]));
  }
  const Jet f = (*req.field)(std::span<const Jet>(x), std::span<const Jet>(y));
  JetResult out(n);
  for (auto& e : detail::mixed_exponents(n, req.x_order, req.y_order)) {
    const double v = f.derivative(e);
    out.set(std::move(e), v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// A vector-valued function of the concatenated coordinates z = (x, y).
using VectorFn = std::function<std::vector<double>(std::span<const double>)>;

struct FdOptions {
  /// Base step; the step for coordinate i is step * (1 + |z_i|).
  double step = 1e-3;
  /// Evaluate a third, finer level and reject non-monotone sequences.
  bool check_cancellation = true;
};

namespace detail {

struct Stencil1d {
  std::vector<int> offsets;
  std::vector<double> weights;
};

// Second-order accurate central stencils, in units of h^order.
inline const Stencil1d& central_stencil(int order) {
  static const Stencil1d s[] = {
      {{0}, {1.0}},
      {{-1, 1}, {-0.5, 0.5}},
      {{-1, 0, 1}, {1.0, -2.0, 1.0}},
      {{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
      {{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
  };
  if (order < 0 || order > 4) throw OrderUnsupported("finite differences support orders up to 4 per coordinate");
  return s[order];
}

struct FdLevel {
  std::vector<double> value;
  double fscale = 0.0;
  double weight_sum = 0.0;
  double denom = 1.0;
};

inline FdLevel fd_level(const VectorFn& f, std::span<const double> z0, std::span<const int> exps,
                        std::span<const double> h) {
  std::vector<int> vars;
  for (std::size_t v = 0; v < exps.size(); ++v)
    if (exps[v] > 0) vars.push_back(static_cast<int>(v));
  FdLevel out;
  std::vector<double> z(z0.begin(), z0.end());
  std::vector<std::size_t> pos(vars.size(), 0);
  double denom = 1.0;
  for (int v : vars) denom *= std::pow(h[static_cast<std::size_t>(v)], exps[static_cast<std::size_t>(v)]);
  out.denom = denom;
  while (true) {
    double w = 1.0;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const auto& st = central_stencil(exps[static_cast<std::size_t>(vars[k])]);
      const auto vi = static_cast<std::size_t>(vars[k]);
      z[vi] = z0[vi] + st.offsets[pos[k]] * h[vi];
      w *= st.weights[pos[k]];
    }
    const std::vector<double> fz = f(z);
    if (out.value.empty()) out.value.assign(fz.size(), 0.0);
    for (std::size_t c = 0; c < fz.size(); ++c) {
      out.value[c] += w * fz[c];
      out.fscale = std::max(out.fscale, std::abs(fz[c]));
    }
    out.weight_sum += std::abs(w);
    std::size_t k = 0;
    for (; k < vars.size(); ++k) {
      const auto& st = central_stencil(exps[static_cast<std::size_t>(vars[k])]);
      if (++pos[k] < st.offsets.size()) break;
      pos[k] = 0;
    }
    if (k == vars.size()) break;
  }
  for (auto& v : out.value) v /= denom;
  return out;
}

}  // namespace detail

/// One mixed partial of f at z0 (exponent vector over z), by central
/// differences at steps h and h/2 combined with one Richardson level.
inline std::vector<double> fd_partial(const VectorFn& f, std::span<const double> z0, std::span<const int> exps,
                                      const FdOptions& opt = {}) {
  if (!(opt.step > 0.0)) throw StepTooSmall("finite difference step must be positive");
  int total = 0;
  for (int e : exps) total += e;
  if (total == 0) return f(z0);
  std::vector<double> h(z0.size());
  for (std::size_t i = 0; i < z0.size(); ++i) h[i] = opt.step * (1.0 + std::abs(z0[i]));
  const auto coarse = detail::fd_level(f, z0, exps, h);
  for (auto& v : h) v *= 0.5;
  const auto fine = detail::fd_level(f, z0, exps, h);
  std::vector<double> out(coarse.value.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = (4.0 * fine.value[c] - coarse.value[c]) / 3.0;
  if (opt.check_cancellation) {
    for (auto& v : h) v *= 0.5;
    const auto finest = detail::fd_level(f, z0, exps, h);
    const double eps = std::numeric_limits<double>::epsilon();
    const double noise = eps * std::max({coarse.fscale, fine.fscale, finest.fscale}) * finest.weight_sum / finest.denom;
    double d1 = 0.0, d2 = 0.0, mag = 0.0;
    for (std::size_t c = 0; c < out.size(); ++c) {
      d1 = std::max(d1, std::abs(coarse.value[c] - fine.value[c]));
      d2 = std::max(d2, std::abs(fine.value[c] - finest.value[c]));
      mag = std::max(mag, std::abs(out[c]));
    }
    if ((d2 > d1 && d2 > 4.0 * noise) || noise > 1e-4 * (mag + finest.fscale))
      throw StepTooSmall("finite differences dominated by cancellation (step " + std::to_string(opt.step) +
                         ", rounding estimate " + std::to_string(noise) + ")");
  }
  return out;
}

/// Mixed partials of a scalar field by finite differences. Total order is
/// limited to three.
inline JetResult fd_eval(const JetRequest& req, double step = 1e-3) {
  detail::check_request(req, kFdLimits, "fd_eval");
  const int n = req.field->dim;
  const ScalarField& field = *req.field;
  const ChartDomain* domain = req.domain;
  VectorFn f = [&field, domain, n](std::span<const double> z) {
    const auto x = z.first(static_cast<std::size_t>(n));
    if (domain && !domain->contains(x)) throw DomainError("fd_eval: stencil point outside chart domain");
    return std::vector<double>{field(x, z.subspan(static_cast<std::size_t>(n)))};
  };
  std::vector<double> z0(req.point.x);
  z0.insert(z0.end(), req.point.y.begin(), req.point.y.end());
  JetResult out(n);
  FdOptions opt;
  opt.step = step;
  for (auto& e : detail::mixed_exponents(n, req.x_order, req.y_order)) {
    const double v = fd_partial(f, z0, e, opt)[0];
    out.set(std::move(e), v);
  }
  return out;
}

/// Symmetric covariant tensor of the order-th y-derivatives of a field at p
/// (the vertical derivative of a scalar, iterated). Exact, via jets.
inline Tensor<double> vertical_jet(const ScalarField& field, const SamplePoint& p, int order) {
  if (order < 0 || order > 3) throw OrderUnsupported("vertical_jet supports orders 0..3");
  const int n = field.dim;
  if (p.dim() != n) throw DomainError("vertical_jet: point dimension mismatch");
  const JetSpace& space = JetSpace::get(n, order);
  std::vector<Jet> x(p.x.begin(), p.x.end()), y;
  for (int i = 0; i < n; ++i) y.push_back(Jet::variable(space, i, p.y[static_cast<std::size_t>(i)]));
  const Jet f = field(std::span<const Jet>(x), std::span<const Jet>(y));
  Tensor<double> out(n, Signature{0, order});
  std::vector<int> e(static_cast<std::size_t>(n));
  out.for_each([&](std::span<const int> idx, double& v) {
    std::fill(e.begin(), e.end(), 0);
    for (int i : idx) ++e[static_cast<std::size_t>(i)];
    v = f.derivative(e);
  });
  return out;
}

}  // namespace finsler
