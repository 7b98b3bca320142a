#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "finsler/error.hpp"

namespace finsler {

/// Chart coordinates x and a nonzero tangent direction y.
struct SamplePoint {
  std::vector<double> x;
  std::vector<double> y;

  SamplePoint() = default;
  SamplePoint(std::vector<double> x_, std::vector<double> y_) : x(std::move(x_)), y(std::move(y_)) {
    if (x.size() != y.size() || x.empty()) throw DomainError("sample point: x and y must have equal, positive length");
    double s = 0.0;
    for (double v : y) s += v * v;
    if (!(s > 0.0)) throw DomainError("sample point: direction y must be nonzero");
  }

  int dim() const noexcept { return static_cast<int>(x.size()); }
};

inline std::string describe(const SamplePoint& p) {
  auto vec = [](const std::vector<double>& v) {
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.17g", i ? ", " : "", v[i]);
      s += buf;
    }
    return s + ")";
  };
  return "x=" + vec(p.x) + " y=" + vec(p.y);
}

/// How sample points are drawn: x uniform in a ball, y uniform on the unit
/// sphere scaled by a factor uniform in [scale_min, scale_max].
struct SamplingSpec {
  int count = 20;
  std::uint64_t seed = 1;
  double radius = 0.4;
  double scale_min = 0.5;
  double scale_max = 2.0;
};

/// Sample `index` of the stream defined by spec. Each sample draws from its
/// own generator keyed on (seed, index), so the result does not depend on the
/// order or the thread in which samples are produced.
inline SamplePoint draw_sample(int dim, const SamplingSpec& spec, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;

  auto unit_vector = [&] {
    std::vector<double> v(static_cast<std::size_t>(dim));
    double s = 0.0;
    do {
      s = 0.0;
      for (auto& c : v) {
        c = normal(gen);
        s += c * c;
      }
    } while (s < 1e-12);
    for (auto& c : v) c /= std::sqrt(s);
    return v;
  };

  std::vector<double> x = unit_vector();
  const double r = spec.radius * std::pow(unit(gen), 1.0 / dim);
  for (auto& c : x) c *= r;
  std::vector<double> y = unit_vector();
  const double lambda = spec.scale_min + (spec.scale_max - spec.scale_min) * unit(gen);
  for (auto& c : y) c *= lambda;
  return SamplePoint(std::move(x), std::move(y));
}

inline std::vector<SamplePoint> draw_samples(int dim, const SamplingSpec& spec) {
  std::vector<SamplePoint> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) out.push_back(draw_sample(dim, spec, static_cast<std::uint64_t>(i)));
  return out;
}

}  // namespace finsler
