#pragma once

// Reference metrics with known curvature behaviour.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/jet.hpp"
#include "finsler/metric.hpp"

namespace finsler {

enum class Verdict { generic, scalar, constant };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::generic: return "generic";
    case Verdict::scalar: return "scalar";
    case Verdict::constant: return "constant";
  }
  return "?";
}

struct CatalogEntry {
  std::string name;
  int dimension = 0;
  std::map<std::string, double> params;
  Verdict expected_verdict = Verdict::generic;
  std::optional<double> expected_k;
  std::string provenance;
  // Equivalent DSL source, when the metric is expressible in the DSL.
  std::optional<std::string> dsl_source;
  FinslerMetric metric;
};

namespace detail {

template <class S>
S dot(std::span<const S> a, std::span<const S> b) {
  S acc{0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

template <class S>
S quadratic_form(const std::vector<std::vector<S>>& a, std::span<const S> y) {
  S acc{0.0};
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) acc += a[i][j] * y[i] * y[j];
  return acc;
}

inline void require_dim(int n, int min, const std::string& name) {
  if (n < min) throw DimensionTooSmall(name + " needs dimension >= " + std::to_string(min));
}

}  // namespace detail

inline CatalogEntry euclidean(int n) {
  detail::require_dim(n, 1, "euclidean");
  return {"euclidean", n, {}, Verdict::constant, 0.0, "flat space, L = |y|", "sqrt(norm2(y))",
          make_metric("euclidean", n, ChartDomain{}, [](auto, auto y) { return sqrt(detail::dot(y, y)); })};
}

/// Conformally flat model of the space form with sectional curvature kappa:
/// a_ij = delta_ij / (1 + kappa |x|^2 / 4)^2.
inline CatalogEntry riemannian_space_form(int n, double kappa) {
  detail::require_dim(n, 1, "riemannian_space_form");
  ChartDomain domain;
  if (kappa < 0.0) {
    domain = ChartDomain::ball(2.0 / std::sqrt(-kappa));
  }
  auto metric = make_metric("riemannian_space_form", n, domain, [kappa](auto x, auto y) {
    const auto conformal = 1.0 + (kappa / 4.0) * detail::dot(x, x);
    return sqrt(detail::dot(y, y)) / conformal;
  });
  return {"riemannian_space_form",
          n,
          {{"kappa", kappa}},
          Verdict::constant,
          kappa,
          "conformal model of the simply connected space form",
          "sqrt(norm2(y))/(1+kappa/4*norm2(x))",
          std::move(metric)};
}

/// Funk metric of the unit ball; constant flag curvature -1/4.
inline CatalogEntry funk(int n) {
  detail::require_dim(n, 1, "funk");
  auto metric = make_metric("funk", n, ChartDomain::ball(1.0), [](auto x, auto y) {
    const auto xx = detail::dot(x, x);
    const auto xy = detail::dot(x, y);
    const auto yy = detail::dot(y, y);
    return (sqrt((1.0 - xx) * yy + xy * xy) + xy) / (1.0 - xx);
  });
  return {"funk",
          n,
          {},
          Verdict::constant,
          -0.25,
          "Funk metric of the unit ball, classical constant flag curvature -1/4",
          "(sqrt((1-norm2(x))*norm2(y)+dot(x,y)^2)+dot(x,y))/(1-norm2(x))",
          std::move(metric)};
}

/// L = |y| + <x, y> on |x| < 1. Projectively flat Randers metric, scalar
/// curvature that is not constant.
inline CatalogEntry randers_pflat(int n) {
  detail::require_dim(n, 1, "randers_pflat");
  auto metric = make_metric("randers_pflat", n, ChartDomain::ball(1.0),
                            [](auto x, auto y) { return sqrt(detail::dot(y, y)) + detail::dot(x, y); });
  return {"randers_pflat",
          n,
          {},
          Verdict::scalar,
          std::nullopt,
          "projectively flat Randers metric |y| + <x,y>",
          "sqrt(norm2(y))+dot(x,y)",
          std::move(metric)};
}

/// Coefficients of the seeded trigonometric perturbation
/// S_ij(x) = c_ij sin(w_ij . x + theta_ij), symmetric in (i, j).
struct Perturbation {
  int n = 0;
  double epsilon = 0.3;
  std::vector<double> amplitude;               // c_ij, |c| <= 1
  std::vector<std::vector<double>> frequency;  // w_ij
  std::vector<double> phase;                   // theta_ij

  static Perturbation draw(int n, std::uint64_t seed, double epsilon = 0.3) {
    Perturbation p;
    p.n = n;
    p.epsilon = epsilon;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), freq(2.0, 3.0), angle(0.0, 2.0 * M_PI);
    const std::size_t nn = static_cast<std::size_t>(n * n);
    p.amplitude.assign(nn, 0.0);
    p.frequency.assign(nn, std::vector<double>(static_cast<std::size_t>(n), 0.0));
    p.phase.assign(nn, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double c = unit(rng);
        std::vector<double> w(static_cast<std::size_t>(n));
        double norm = 0.0;
        for (auto& v : w) {
          v = unit(rng);
          norm += v * v;
        }
        const double target = freq(rng);
        norm = std::sqrt(norm);
        for (auto& v : w) v *= target / (norm > 0.0 ? norm : 1.0);
        const double th = angle(rng);
        for (const auto idx : {i * n + j, j * n + i}) {
          p.amplitude[static_cast<std::size_t>(idx)] = c;
          p.frequency[static_cast<std::size_t>(idx)] = w;
          p.phase[static_cast<std::size_t>(idx)] = th;
        }
      }
    return p;
  }

  template <class S>
  std::vector<std::vector<S>> coefficients(std::span<const S> x) const {
    std::vector<std::vector<S>> a(static_cast<std::size_t>(n), std::vector<S>(static_cast<std::size_t>(n), S{0.0}));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i * n + j);
        S arg{phase[idx]};
        for (int m = 0; m < n; ++m) arg += frequency[idx][static_cast<std::size_t>(m)] * x[static_cast<std::size_t>(m)];
        using std::sin;
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            S{i == j ? 1.0 : 0.0} + (epsilon * amplitude[idx]) * sin(arg);
      }
    return a;
  }
};

/// L = sqrt(a_ij(x) y^i y^j), a = I + 0.3 S(x). Row sums of |0.3 S| stay below
/// one for n <= 3, so a is positive definite everywhere; for larger n the
/// metric check at each sample point catches indefiniteness.
inline CatalogEntry perturbed_riemannian(int n, std::uint64_t seed) {
  detail::require_dim(n, 1, "perturbed_riemannian");
  const Perturbation pert = Perturbation::draw(n, seed);
  auto metric = make_metric("perturbed_riemannian", n, ChartDomain{}, [pert](auto x, auto y) {
    using S = typename decltype(x)::value_type;
    const auto a = pert.coefficients<std::remove_const_t<S>>(x);
    return sqrt(detail::quadratic_form(a, y));
  });
  return {"perturbed_riemannian",
          n,
          {{"seed", static_cast<double>(seed)}},
          Verdict::generic,
          std::nullopt,
          "identity plus a seeded trigonometric perturbation of amplitude 0.3",
          std::nullopt,
          std::move(metric)};
}

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"euclidean", "riemannian_space_form", "funk", "randers_pflat",
                                              "perturbed_riemannian"};
  return names;
}

/// Looks up a catalog entry by key. Recognized params: kappa (space form,
/// default 1) and seed (perturbed_riemannian, default 7).
inline CatalogEntry make_catalog_entry(const std::string& name, int n, const std::map<std::string, double>& params = {}) {
  auto param = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : params) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) throw ConfigError("catalog entry '" + name + "' has no parameter '" + key + "'");
    }
  };
  if (name == "euclidean") return reject_unknown({}), euclidean(n);
  if (name == "riemannian_space_form") return reject_unknown({"kappa"}), riemannian_space_form(n, param("kappa", 1.0));
  if (name == "funk") return reject_unknown({}), funk(n);
  if (name == "randers_pflat") return reject_unknown({}), randers_pflat(n);
  if (name == "perturbed_riemannian") {
    reject_unknown({"seed"});
    const double s = param("seed", 7.0);
    if (s < 0.0 || s != std::floor(s)) throw ConfigError("perturbed_riemannian seed must be a nonnegative integer");
    return perturbed_riemannian(n, static_cast<std::uint64_t>(s));
  }
  throw ConfigError("unknown catalog metric '" + name + "'");
}

}  // namespace finsler
