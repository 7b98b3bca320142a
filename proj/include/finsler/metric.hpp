#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>

#include "finsler/error.hpp"
#include "finsler/jet.hpp"
#include "finsler/sample.hpp"

namespace finsler {

/// A scalar field f(x, y) on a chart, evaluable on plain doubles and on jets.
struct ScalarField {
  using RealFn = std::function<double(std::span<const double>, std::span<const double>)>;
  using JetFn = std::function<Jet(std::span<const Jet>, std::span<const Jet>)>;

  int dim = 0;
  RealFn real;
  JetFn jet;

  double operator()(std::span<const double> x, std::span<const double> y) const { return real(x, y); }
  Jet operator()(std::span<const Jet> x, std::span<const Jet> y) const { return jet(x, y); }
};

/// Builds a ScalarField from a generic callable f(span<const S>, span<const S>).
template <class F>
ScalarField make_field(int dim, F f) {
  return ScalarField{
      dim,
      [f](std::span<const double> x, std::span<const double> y) -> double { return f(x, y); },
      [f](std::span<const Jet> x, std::span<const Jet> y) -> Jet { return f(x, y); },
  };
}

struct ChartDomain {
  std::string description = "all of R^n";
  std::function<bool(std::span<const double>)> contains = [](std::span<const double>) { return true; };

  static ChartDomain ball(double radius) {
    return {"open ball |x| < " + std::to_string(radius), [radius](std::span<const double> x) {
              double s = 0.0;
              for (double v : x) s += v * v;
              return s < radius * radius;
            }};
  }
};

/// A Finsler fundamental function L(x, y) on a single chart.
struct FinslerMetric {
  std::string name;
  ScalarField L;
  ChartDomain domain;

  int dim() const noexcept { return L.dim; }

  void require_in_domain(std::span<const double> x) const {
    if (!domain.contains(x))
      throw DomainError(name + ": point outside chart domain (" + domain.description + ")");
  }
  void require_valid(const SamplePoint& p) const {
    if (p.dim() != dim())
      throw DomainError(name + ": sample dimension " + std::to_string(p.dim()) + " != metric dimension " +
                        std::to_string(dim()));
    require_in_domain(p.x);
  }
};

template <class F>
FinslerMetric make_metric(std::string name, int dim, ChartDomain domain, F f) {
  return FinslerMetric{std::move(name), make_field(dim, std::move(f)), std::move(domain)};
}

/// Euler check y^j dL/dy^j = degree * L at each point, via first-order jets.
/// Returns the worst relative violation; throws HomogeneityError above tol.
inline double check_homogeneity(const FinslerMetric& metric, std::span<const SamplePoint> points,
                                double degree = 1.0, double tol = 1e-8) {
  const int n = metric.dim();
  const JetSpace& space = JetSpace::get(n, 1);
  double worst = 0.0;
  for (const auto& p : points) {
    metric.require_valid(p);
    std::vector<Jet> x(p.x.begin(), p.x.end()), y;
    for (int i = 0; i < n; ++i) y.push_back(Jet::variable(space, i, p.y[static_cast<std::size_t>(i)]));
    const Jet L = metric.L(std::span<const Jet>(x), std::span<const Jet>(y));
    double euler = 0.0;
    for (int i = 0; i < n; ++i) euler += p.y[static_cast<std::size_t>(i)] * L.partial(i).value();
    const double rel = std::abs(euler - degree * L.value()) / std::max(std::abs(L.value()), 1e-300);
    worst = std::max(worst, rel);
    if (rel > tol)
      throw HomogeneityError(metric.name + ": fundamental function is not positively homogeneous of degree " +
                             std::to_string(degree) + " in y (y.dL/dy = " + std::to_string(euler) + ", L = " +
                             std::to_string(L.value()) + " at " + describe(p) + ")");
  }
  return worst;
}

}  // namespace finsler
