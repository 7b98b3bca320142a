#pragma once

// Truncated multivariate Taylor series ("jets") in a fixed set of variables.
//
// A Jet stores the Taylor coefficients of a function around an expansion
// point, for every monomial of total degree <= order(). Arithmetic and the
// elementary functions act on the series exactly (up to rounding), and partial
// differentiation shifts coefficients, lowering the valid order by one. That
// is what lets a whole pipeline (matrix inversion, spray, curvature, ...) be
// written once over a generic scalar and then differentiated again.
//
// A Jet without a space is a plain constant; it mixes with any space.

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "finsler/error.hpp"

namespace finsler {

/// Monomial bookkeeping for jets in `vars` variables truncated at `max_order`.
/// Spaces are interned; obtain them through JetSpace::get.
class JetSpace {
 public:
  static const JetSpace& get(int vars, int max_order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[{vars, max_order}];
    if (!slot) slot.reset(new JetSpace(vars, max_order));
    return *slot;
  }

  int vars() const noexcept { return vars_; }
  int max_order() const noexcept { return max_order_; }

  /// Number of monomials of total degree <= order.
  std::size_t count(int order) const {
    return count_[static_cast<std::size_t>(std::clamp(order, -1, max_order_) + 1)];
  }
  int degree(std::size_t idx) const { return degree_[idx]; }
  std::span<const std::uint8_t> exponents(std::size_t idx) const {
    return {exps_.data() + idx * static_cast<std::size_t>(vars_), static_cast<std::size_t>(vars_)};
  }

  std::size_t index_of(std::span<const int> exps) const {
    std::vector<std::uint8_t> key(exps.begin(), exps.end());
    auto it = index_.find(key);
    if (it == index_.end()) throw OrderUnsupported("monomial outside jet space");
    return it->second;
  }

  /// For monomial i, entry j is the index of monomial(i) * monomial(j), for all
  /// j with degree(i) + degree(j) <= max_order (j in storage order).
  std::span<const std::uint32_t> product_row(std::size_t i) const {
    return {products_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
  }

  /// Index of monomial(t) * x_var for every t of degree < max_order.
  std::span<const std::uint32_t> raise(int var) const {
    return raise_[static_cast<std::size_t>(var)];
  }

 private:
  JetSpace(int vars, int max_order) : vars_(vars), max_order_(max_order) {
    if (vars < 1 || max_order < 0) throw OrderUnsupported("invalid jet space");
    // graded enumeration: degree 0, then degree 1, ...; lexicographic inside
    std::vector<std::vector<std::uint8_t>> all;
    count_.push_back(0);
    for (int d = 0; d <= max_order; ++d) {
      std::vector<std::uint8_t> e(static_cast<std::size_t>(vars), 0);
      enumerate(all, e, 0, d);
      count_.push_back(all.size());
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      index_.emplace(all[i], i);
      exps_.insert(exps_.end(), all[i].begin(), all[i].end());
      int d = 0;
      for (auto v : all[i]) d += v;
      degree_.push_back(d);
    }
    std::vector<std::uint8_t> sum(static_cast<std::size_t>(vars));
    row_start_.push_back(0);
    for (std::size_t i = 0; i < all.size(); ++i) {
      const std::size_t jn = count(max_order - degree_[i]);
      for (std::size_t j = 0; j < jn; ++j) {
        for (std::size_t v = 0; v < sum.size(); ++v) sum[v] = all[i][v] + all[j][v];
        products_.push_back(static_cast<std::uint32_t>(index_.at(sum)));
      }
      row_start_.push_back(products_.size());
    }
    raise_.resize(static_cast<std::size_t>(vars));
    for (int v = 0; v < vars; ++v) {
      for (std::size_t t = 0; t < count(max_order - 1); ++t) {
        sum = all[t];
        ++sum[static_cast<std::size_t>(v)];
        raise_[static_cast<std::size_t>(v)].push_back(static_cast<std::uint32_t>(index_.at(sum)));
      }
    }
  }

  static void enumerate(std::vector<std::vector<std::uint8_t>>& out, std::vector<std::uint8_t>& e,
                        std::size_t pos, int remaining) {
    if (pos + 1 == e.size()) {
      e[pos] = static_cast<std::uint8_t>(remaining);
      out.push_back(e);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[pos] = static_cast<std::uint8_t>(k);
      enumerate(out, e, pos + 1, remaining - k);
    }
    e[pos] = 0;
  }

  int vars_;
  int max_order_;
  std::vector<std::size_t> count_;
  std::vector<int> degree_;
  std::vector<std::uint8_t> exps_;
  std::map<std::vector<std::uint8_t>, std::size_t> index_;
  std::vector<std::uint32_t> products_;
  std::vector<std::size_t> row_start_;
  std::vector<std::vector<std::uint32_t>> raise_;
};

class Jet {
 public:
  static constexpr int kConstantOrder = INT_MAX;

  Jet(double v = 0.0) : coeffs_{v} {}  // NOLINT(google-explicit-constructor)

  /// A zero series on `space`, valid to `order`.
  Jet(const JetSpace& space, int order)
      : space_(&space), order_(std::min(order, space.max_order())), coeffs_(space.count(order_), 0.0) {}

  /// The coordinate function value + t_var.
  static Jet variable(const JetSpace& space, int var, double value) {
    Jet j(space, space.max_order());
    j.coeffs_[0] = value;
    if (space.max_order() >= 1) j.coeffs_[1 + static_cast<std::size_t>(var)] = 1.0;
    return j;
  }

  const JetSpace* space() const noexcept { return space_; }
  bool is_constant() const noexcept { return space_ == nullptr; }
  int order() const noexcept { return order_; }
  double value() const noexcept { return coeffs_[0]; }

  std::span<const double> coefficients() const noexcept { return coeffs_; }
  std::span<double> coefficients() noexcept { return coeffs_; }

  /// Taylor coefficient of the monomial with the given exponents.
  double coefficient(std::span<const int> exps) const {
    int d = 0;
    bool nonzero = false;
    for (int e : exps) {
      d += e;
      nonzero = nonzero || e != 0;
    }
    if (is_constant()) return nonzero ? 0.0 : coeffs_[0];
    if (d > order_) throw OrderUnsupported("coefficient of degree " + std::to_string(d) + " beyond jet order " +
                                           std::to_string(order_));
    return coeffs_[space_->index_of(exps)];
  }

  /// Mixed partial derivative: coefficient times prod(exps!).
  double derivative(std::span<const int> exps) const {
    double f = 1.0;
    for (int e : exps)
      for (int k = 2; k <= e; ++k) f *= k;
    return f * coefficient(exps);
  }

  /// Partial derivative with respect to variable `var`; order drops by one.
  Jet partial(int var) const {
    if (is_constant()) return Jet(0.0);
    if (order_ < 1)
      throw OrderUnsupported("jet of order " + std::to_string(order_) + " cannot be differentiated");
    Jet r(*space_, order_ - 1);
    const auto up = space_->raise(var);
    for (std::size_t t = 0; t < r.coeffs_.size(); ++t) {
      const double factor = space_->exponents(t)[static_cast<std::size_t>(var)] + 1.0;
      r.coeffs_[t] = factor * coeffs_[up[t]];
    }
    return r;
  }

  Jet truncated(int order) const {
    if (is_constant() || order >= order_) return *this;
    Jet r = *this;
    r.order_ = std::max(order, 0);
    r.coeffs_.resize(space_->count(r.order_));
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  Jet& operator+=(const Jet& o) { return *this = add(*this, o, 1.0); }
  Jet& operator-=(const Jet& o) { return *this = add(*this, o, -1.0); }
  Jet& operator*=(const Jet& o) { return *this = multiply(*this, o); }
  Jet& operator/=(const Jet& o) { return *this = multiply(*this, reciprocal(o)); }

  friend Jet operator+(const Jet& a, const Jet& b) { return add(a, b, 1.0); }
  friend Jet operator-(const Jet& a, const Jet& b) { return add(a, b, -1.0); }
  friend Jet operator*(const Jet& a, const Jet& b) { return multiply(a, b); }
  friend Jet operator/(const Jet& a, const Jet& b) { return multiply(a, reciprocal(b)); }

  friend Jet operator+(const Jet& a, double b) { return shifted(a, b); }
  friend Jet operator+(double a, const Jet& b) { return shifted(b, a); }
  friend Jet operator-(const Jet& a, double b) { return shifted(a, -b); }
  friend Jet operator-(double a, const Jet& b) { return shifted(-b, a); }
  friend Jet operator*(const Jet& a, double b) { return scaled(a, b); }
  friend Jet operator*(double a, const Jet& b) { return scaled(b, a); }
  friend Jet operator/(const Jet& a, double b) { return scaled(a, 1.0 / b); }
  friend Jet operator/(double a, const Jet& b) { return scaled(reciprocal(b), a); }

  /// f(a) for a function with Taylor coefficients taylor[k] = f^(k)(a0)/k!.
  friend Jet compose(const Jet& a, std::span<const double> taylor) {
    if (a.is_constant()) return Jet(taylor[0]);
    Jet u = a;
    u.coeffs_[0] = 0.0;
    const int o = a.order_;
    Jet r(*a.space_, o);
    r.coeffs_[0] = taylor[static_cast<std::size_t>(o)];
    for (int k = o - 1; k >= 0; --k) {
      r = multiply(r, u);
      r.coeffs_[0] += taylor[static_cast<std::size_t>(k)];
    }
    return r;
  }

  friend Jet reciprocal(const Jet& a) {
    const double a0 = a.value();
    if (a0 == 0.0) throw DomainError("jet reciprocal of zero");
    std::vector<double> t(static_cast<std::size_t>(a.taylor_len()));
    double p = 1.0 / a0;
    for (auto& c : t) {
      c = p;
      p *= -1.0 / a0;
    }
    return compose(a, t);
  }

 private:
  int taylor_len() const { return is_constant() ? 1 : order_ + 1; }

  static void check_spaces(const Jet& a, const Jet& b) {
    if (a.space_ && b.space_ && a.space_ != b.space_) throw OrderUnsupported("jets from different spaces");
  }

  static Jet shifted(Jet a, double s) {
    a.coeffs_[0] += s;
    return a;
  }
  static Jet scaled(Jet a, double s) {
    for (auto& c : a.coeffs_) c *= s;
    return a;
  }

  static Jet add(const Jet& a, const Jet& b, double sign) {
    check_spaces(a, b);
    if (b.is_constant()) return shifted(a, sign * b.coeffs_[0]);
    if (a.is_constant()) return shifted(scaled(b, sign), a.coeffs_[0]);
    const int o = std::min(a.order_, b.order_);
    Jet r(*a.space_, o);
    for (std::size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] = a.coeffs_[i] + sign * b.coeffs_[i];
    return r;
  }

  static Jet multiply(const Jet& a, const Jet& b) {
    check_spaces(a, b);
    if (b.is_constant()) return scaled(a, b.coeffs_[0]);
    if (a.is_constant()) return scaled(b, a.coeffs_[0]);
    const int o = std::min(a.order_, b.order_);
    const JetSpace& sp = *a.space_;
    Jet r(sp, o);
    const std::size_t n = sp.count(o);
    for (std::size_t i = 0; i < n; ++i) {
      const double ai = a.coeffs_[i];
      if (ai == 0.0) continue;
      const auto row = sp.product_row(i);
      const std::size_t jn = sp.count(o - sp.degree(i));
      for (std::size_t j = 0; j < jn; ++j) r.coeffs_[row[j]] += ai * b.coeffs_[j];
    }
    return r;
  }

  friend Jet pow(const Jet& a, double r);
  friend Jet sqrt(const Jet& a);
  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);

  const JetSpace* space_ = nullptr;
  int order_ = kConstantOrder;
  std::vector<double> coeffs_;
};

/// a^r. Non-integer r needs a positive constant term.
inline Jet pow(const Jet& a, double r) {
  const double a0 = a.value();
  const bool integral = r == std::floor(r);
  if (!integral && a0 <= 0.0) throw DomainError("jet pow with non-integer exponent of a non-positive value");
  if (a0 == 0.0 && integral && r >= 0.0) {
    Jet out = 1.0;
    for (int i = 0; i < static_cast<int>(r); ++i) out *= a;
    return out;
  }
  std::vector<double> t(static_cast<std::size_t>(a.taylor_len()));
  double binom = 1.0;  // binom(r, k)
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = binom * std::pow(a0, r - static_cast<double>(k));
    binom *= (r - static_cast<double>(k)) / static_cast<double>(k + 1);
  }
  return compose(a, t);
}

inline Jet sqrt(const Jet& a) {
  if (a.value() <= 0.0) throw DomainError("jet sqrt of a non-positive value");
  return pow(a, 0.5);
}

inline Jet exp(const Jet& a) {
  std::vector<double> t(static_cast<std::size_t>(a.taylor_len()));
  double f = std::exp(a.value());
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = f;
    f /= static_cast<double>(k + 1);
  }
  return compose(a, t);
}

inline Jet log(const Jet& a) {
  const double a0 = a.value();
  if (a0 <= 0.0) throw DomainError("jet log of a non-positive value");
  std::vector<double> t(static_cast<std::size_t>(a.taylor_len()));
  t[0] = std::log(a0);
  double p = 1.0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    p /= a0;
    t[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / static_cast<double>(k);
  }
  return compose(a, t);
}

inline Jet sin(const Jet& a) {
  std::vector<double> t(static_cast<std::size_t>(a.taylor_len()));
  const double s = std::sin(a.value()), c = std::cos(a.value());
  double f = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double d[4] = {s, c, -s, -c};
    t[k] = d[k % 4] * f;
    f /= static_cast<double>(k + 1);
  }
  return compose(a, t);
}

inline Jet cos(const Jet& a) {
  std::vector<double> t(static_cast<std::size_t>(a.taylor_len()));
  const double s = std::sin(a.value()), c = std::cos(a.value());
  double f = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double d[4] = {c, -s, -c, s};
    t[k] = d[k % 4] * f;
    f /= static_cast<double>(k + 1);
  }
  return compose(a, t);
}

// Lets generic code call sqrt, pow, ... unqualified on either scalar type.
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

// Generic access to the point value of a scalar (double or Jet).
inline double value_of(double v) { return v; }
inline double value_of(const Jet& j) { return j.value(); }

template <class S>
concept GenericScalar = std::is_same_v<S, double> || std::is_same_v<S, Jet>;

}  // namespace finsler
