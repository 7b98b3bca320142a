#pragma once

// Sample-based classification of a metric as generic, of scalar curvature, or
// of constant curvature. Verdicts hold at the sampled points only.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "finsler/catalog.hpp"
#include "finsler/error.hpp"
#include "finsler/fd_pipeline.hpp"
#include "finsler/identities.hpp"
#include "finsler/parallel.hpp"
#include "finsler/point_data.hpp"
#include "finsler/sample.hpp"
#include "finsler/scalar_class.hpp"

namespace finsler {

struct SamplePredicates {
  double k = 0.0;
  double isotropy = 0.0;
  double C_norm = 0.0;
  // NaN when the backend cannot reach B and A.
  double B_norm = std::numeric_limits<double>::quiet_NaN();
  double A_norm = std::numeric_limits<double>::quiet_NaN();
};

inline SamplePredicates sample_predicates(const PointData& d) {
  SamplePredicates s;
  s.k = d.k;
  s.isotropy = isotropy_residual(d.deviation, d.k, d.frame.L, d.frame.phi);
  s.C_norm = frobenius_norm(d.C);
  if (d.B) s.B_norm = frobenius_norm(*d.B);
  if (d.A) s.A_norm = frobenius_norm(*d.A);
  return s;
}

struct ResidualEntry {
  double value = 0.0;
  double tolerance = 0.0;
};

struct ClassificationReport {
  std::string metric;
  Verdict verdict = Verdict::generic;
  std::vector<SamplePoint> points;
  std::vector<SamplePredicates> samples;
  std::map<std::string, ResidualEntry> residuals;
  Backend backend = Backend::jet;
  std::uint64_t seed = 0;
  double k_mean = 0.0;
  double k_stdev = 0.0;
  bool ladder_checked = false;
};

/// Classifies from per-point data already computed at the sampled points.
inline ClassificationReport classify_points(const std::string& name, int dim, const std::vector<PointData>& data,
                                            std::uint64_t seed, Backend backend, const Tolerances& tol) {
  if (dim < 3) throw DimensionTooSmall(name + ": scalar curvature is defined for dimension >= 3, got " + std::to_string(dim));
  if (data.empty()) throw ConfigError("classification needs at least one sample");
  ClassificationReport r;
  r.metric = name;
  r.backend = backend;
  r.seed = seed;
  double iso = 0.0, cmax = 0.0, bmax = 0.0, amax = 0.0, sum = 0.0;
  r.ladder_checked = true;
  for (const auto& d : data) {
    const auto s = sample_predicates(d);
    r.points.push_back(d.point);
    r.samples.push_back(s);
    iso = std::max(iso, s.isotropy);
    cmax = std::max(cmax, s.C_norm);
    if (std::isnan(s.B_norm) || std::isnan(s.A_norm)) {
      r.ladder_checked = false;
    } else {
      bmax = std::max(bmax, s.B_norm);
      amax = std::max(amax, s.A_norm);
    }
    sum += s.k;
  }
  const double count = static_cast<double>(data.size());
  r.k_mean = sum / count;
  double var = 0.0;
  for (const auto& s : r.samples) var += (s.k - r.k_mean) * (s.k - r.k_mean);
  r.k_stdev = std::sqrt(var / count);
  const double spread = r.k_stdev / (1.0 + std::abs(r.k_mean));

  r.residuals["deviation.isotropy_max"] = {iso, tol.isotropy};
  r.residuals["C.norm_max"] = {cmax, tol.vanishing};
  r.residuals["k.relative_spread"] = {spread, tol.k_spread};
  if (r.ladder_checked) {
    r.residuals["B.norm_max"] = {bmax, tol.vanishing};
    r.residuals["A.norm_max"] = {amax, tol.vanishing};
  }

  if (!(iso < tol.isotropy)) {
    r.verdict = Verdict::generic;
    return r;
  }
  const bool c_zero = cmax < tol.vanishing;
  // With a single sample the spread carries no information.
  if (data.size() > 1 && c_zero != (spread < tol.k_spread))
    throw InternalInconsistency(name + ": C criterion (" + (c_zero ? "vanishes" : "nonzero") +
                                ") disagrees with the spread of k across samples (relative stdev " +
                                std::to_string(spread) + ")");
  if (r.ladder_checked) {
    const bool b_zero = bmax < tol.vanishing, a_zero = amax < tol.vanishing;
    if (b_zero != c_zero || a_zero != c_zero)
      throw InternalInconsistency(name + ": vanishing of C, B and A disagree (max norms " + std::to_string(cmax) +
                                  ", " + std::to_string(bmax) + ", " + std::to_string(amax) + ")");
  }
  r.verdict = c_zero ? Verdict::constant : Verdict::scalar;
  return r;
}

inline std::vector<PointData> analyze_samples(const FinslerMetric& metric, const std::vector<SamplePoint>& points,
                                              Backend backend, unsigned threads = 0) {
  return parallel_map(
      points.size(), [&](std::size_t i) { return analyze(metric, points[i], backend); }, threads);
}

inline ClassificationReport classify(const FinslerMetric& metric, const SamplingSpec& spec, Backend backend = Backend::jet,
                                     const Tolerances& tol = Tolerances::defaults(Backend::jet), unsigned threads = 0) {
  if (metric.dim() < 3)
    throw DimensionTooSmall(metric.name + ": scalar curvature is defined for dimension >= 3, got " +
                            std::to_string(metric.dim()));
  const auto points = draw_samples(metric.dim(), spec);
  return classify_points(metric.name, metric.dim(), analyze_samples(metric, points, backend, threads), spec.seed,
                         backend, tol);
}

}  // namespace finsler
