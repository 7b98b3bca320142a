// Walks through the main objects for a few catalog metrics at one point.
#include <cstdio>

#include "finsler/finsler.hpp"

using namespace finsler;

static void show(const CatalogEntry& e, const SamplePoint& p) {
  const PointData d = analyze_jet(e.metric, p);
  const auto s = sample_predicates(d);
  std::printf("%-22s L=%.6f  k=%+.6f  |G|=%.3e  |H|=%.3e  |C|=%.3e  |B|=%.3e  isotropy=%.1e\n", e.name.c_str(),
              d.frame.L, d.k, frobenius_norm(d.spray), frobenius_norm(d.deviation), s.C_norm, s.B_norm, s.isotropy);
}

int main() {
  const SamplePoint p({0.1, -0.2, 0.15}, {0.6, 0.3, -0.8});
  for (const auto& e : {euclidean(3), riemannian_space_form(3, 1.0), funk(3), randers_pflat(3), perturbed_riemannian(3, 7)})
    show(e, p);

  // A metric written in the expression language behaves like a catalog entry.
  const auto ast = parse_metric("sqrt(norm2(y) + 0.5*y1^2) + 0.2*dot(x, y)", 3);
  const auto custom = metric_from_ast("custom", ast);
  SamplingSpec spec;
  spec.count = 8;
  const auto report = classify(custom, spec);
  std::printf("\ncustom metric: %s, mean k %.4f\n", to_string(report.verdict), report.k_mean);
  return 0;
}
