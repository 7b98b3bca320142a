#include <gtest/gtest.h>

#include <cmath>

#include "finsler/finsler.hpp"
#include "oracles/riemann_oracle.hpp"

using namespace finsler;

namespace {

std::vector<SamplePoint> samples(int count, std::uint64_t seed = 1, int n = 3) {
  SamplingSpec spec;
  spec.count = count;
  spec.seed = seed;
  return draw_samples(n, spec);
}

std::vector<CatalogEntry> catalog3() {
  return {euclidean(3),    riemannian_space_form(3, 1.0), riemannian_space_form(3, -1.0), funk(3),
          randers_pflat(3), perturbed_riemannian(3, 7)};
}

double rel_diff(const Tensor<double>& a, const Tensor<double>& b) {
  return frobenius_norm(a - b) / std::max({frobenius_norm(a), frobenius_norm(b), 1e-300});
}

oracle::RiemannOracle space_form_oracle(double kappa) {
  return oracle::RiemannOracle([kappa](const oracle::Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    const double c = 1.0 + kappa * s / 4.0;
    oracle::Mat a(x.size(), oracle::Vec(x.size(), 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) a[i][i] = 1.0 / (c * c);
    return a;
  });
}

oracle::RiemannOracle perturbed_oracle(int n, std::uint64_t seed) {
  const Perturbation pert = Perturbation::draw(n, seed);
  return oracle::RiemannOracle(
      [pert](const oracle::Vec& x) { return pert.coefficients<double>(std::span<const double>(x)); });
}

TensorFieldFn scalar_field(const FinslerMetric& m) {
  return [m](std::span<const Jet> x, std::span<const Jet> y) {
    Tensor<Jet> t(m.dim(), {0, 0});
    t[0] = m.L(x, y);
    return t;
  };
}

}  // namespace

// ---------------------------------------------------------------------------
// Connection
// ---------------------------------------------------------------------------

TEST(Berwald, EuclideanConnectionVanishes) {
  const auto e = euclidean(3);
  for (const auto& p : samples(5)) {
    const auto c = connection(e.metric, p);
    EXPECT_EQ(max_abs(c.spray), 0.0);
    EXPECT_EQ(max_abs(c.nonlinear), 0.0);
    EXPECT_EQ(max_abs(c.berwald), 0.0);
  }
}

TEST(Berwald, RiemannianSprayAndCoefficientsMatchChristoffelOracle) {
  const auto entry = perturbed_riemannian(3, 7);
  const auto orc = perturbed_oracle(3, 7);
  for (const auto& p : samples(6, 4)) {
    const auto c = connection(entry.metric, p);
    const auto gamma = orc.christoffel(p.x);
    for (int i = 0; i < 3; ++i) {
      double G = 0.0;
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const double v = gamma[static_cast<std::size_t>((i * 3 + j) * 3 + k)];
          G += 0.5 * v * p.y[static_cast<std::size_t>(j)] * p.y[static_cast<std::size_t>(k)];
          EXPECT_NEAR(c.berwald(i, j, k), v, 1e-8);
        }
      EXPECT_NEAR(c.spray(i), G, 1e-8);
    }
  }
}

TEST(Berwald, RiemannianCoefficientsIndependentOfDirection) {
  const auto entry = riemannian_space_form(3, -1.0);
  const SamplePoint p({0.2, -0.1, 0.3}, {1.0, 0.5, -0.4});
  const SamplePoint q({0.2, -0.1, 0.3}, {-0.3, 2.0, 0.7});
  EXPECT_LT(rel_diff(connection(entry.metric, p).berwald, connection(entry.metric, q).berwald), 1e-13);
}

TEST(Berwald, SprayIsHomogeneousOfDegreeTwo) {
  const auto entry = funk(3);
  for (const auto& p : samples(10, 2)) {
    std::vector<double> y2 = p.y;
    for (auto& v : y2) v *= 2.0;
    const auto a = spray(entry.metric, p);
    const auto b = spray(entry.metric, SamplePoint(p.x, y2));
    EXPECT_LT(rel_diff(b, a * 4.0), 1e-13);
  }
}

TEST(Berwald, CoefficientsSymmetricOnAllCatalogMetrics) {
  for (const auto& e : catalog3())
    for (const auto& p : samples(5, 3)) {
      const auto c = connection(e.metric, p);
      EXPECT_LE(frobenius_norm(c.berwald - swap_slots<double>(c.berwald, 1, 2)),
                1e-10 * std::max(1.0, frobenius_norm(c.berwald)))
          << e.name;
    }
}

TEST(Berwald, RandersSprayIsProjectivelyFlat) {
  // G^i = P y^i for a projectively flat metric.
  const auto e = randers_pflat(3);
  for (const auto& p : samples(8, 5)) {
    const auto G = spray(e.metric, p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(G(i) * p.y[static_cast<std::size_t>(j)] - G(j) * p.y[static_cast<std::size_t>(i)], 0.0, 1e-12);
  }
}

TEST(Berwald, CovariantDerivativesOfL) {
  for (const auto& e : catalog3())
    for (const auto& p : samples(4, 6)) {
      const auto hL = h_cov_deriv(e.metric, scalar_field(e.metric), p);
      EXPECT_LT(frobenius_norm(hL), 1e-11) << e.name;
      const auto vL = v_cov_deriv(e.metric, scalar_field(e.metric), p);
      const auto frame = structural_frame(e.metric, p);
      EXPECT_LT(rel_diff(vL, frame.ell), 1e-13) << e.name;
    }
}

TEST(Berwald, DerivativesOfConstantAndPositionOnlyFields) {
  const auto e = euclidean(3);
  const auto f = funk(3);
  const TensorFieldFn constant = [](std::span<const Jet> x, std::span<const Jet>) {
    Tensor<Jet> t(static_cast<int>(x.size()), {1, 1}, Jet(0.0));
    for (int i = 0; i < t.dim(); ++i)
      for (int j = 0; j < t.dim(); ++j) t(i, j) = Jet(1.0 + i - 0.5 * j);
    return t;
  };
  const TensorFieldFn position = [](std::span<const Jet> x, std::span<const Jet>) {
    Tensor<Jet> t(static_cast<int>(x.size()), {0, 1}, Jet(0.0));
    for (int i = 0; i < t.dim(); ++i) t(i) = x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    return t;
  };
  for (const auto& p : samples(3, 7)) {
    EXPECT_EQ(max_abs(h_cov_deriv(e.metric, constant, p)), 0.0);
    EXPECT_EQ(max_abs(v_cov_deriv(f.metric, position, p)), 0.0);
  }
}

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

TEST(Curvature, EuclideanBlocksVanish) {
  const auto e = euclidean(3);
  for (const auto& p : samples(4)) {
    const auto b = h_curvature(e.metric, p);
    EXPECT_EQ(max_abs(b.Rhat), 0.0);
    EXPECT_EQ(max_abs(b.R), 0.0);
    EXPECT_EQ(max_abs(b.H), 0.0);
    EXPECT_EQ(bianchi_residual(e.metric, p), 0.0);
  }
}

TEST(Curvature, TorsionAntisymmetricOnAllCatalogMetrics) {
  for (const auto& e : catalog3())
    for (const auto& p : samples(4, 9)) {
      const auto r = vh_torsion(e.metric, p);
      EXPECT_LE(frobenius_norm(r + swap_slots<double>(r, 1, 2)), 1e-10 * std::max(1.0, frobenius_norm(r))) << e.name;
    }
}

TEST(Curvature, SphereDeviationMatchesRiemannOracle) {
  for (const double kappa : {1.0, -1.0, 0.5}) {
    const auto e = riemannian_space_form(3, kappa);
    const auto orc = space_form_oracle(kappa);
    for (const auto& p : samples(5, 10)) {
      const auto H = deviation(e.metric, p);
      const auto want = orc.jacobi(p.x, p.y);
      const auto f = structural_frame(e.metric, p);
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
          EXPECT_NEAR(H(i, k), want[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], 1e-6);
          EXPECT_NEAR(H(i, k), kappa * f.L * f.L * f.phi(i, k), 1e-6);
        }
    }
  }
}

TEST(Curvature, SphereTorsionHasConstantCurvatureForm) {
  const double kappa = 1.0;
  const auto e = riemannian_space_form(3, kappa);
  for (const auto& p : samples(5, 11)) {
    const auto r = vh_torsion(e.metric, p);
    const auto f = structural_frame(e.metric, p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const double want = kappa * f.L * (f.ell(j) * (i == k) - f.ell(k) * (i == j));
          EXPECT_NEAR(r(i, j, k), want, 1e-10);
        }
  }
}

TEST(Curvature, HCurvatureMatchesRiemannOracleOnGenericMetric) {
  // R^i_jkl here is the i-component of R_textbook(d_k, d_j) d_l, with
  // R_textbook(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
  const auto e = perturbed_riemannian(3, 7);
  const auto orc = perturbed_oracle(3, 7);
  for (const auto& p : samples(3, 12)) {
    const auto b = h_curvature(e.metric, p);
    const auto r = orc.riemann(p.x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l)
            EXPECT_NEAR(b.R(i, j, k, l), r[static_cast<std::size_t>(((i * 3 + l) * 3 + k) * 3 + j)], 1e-7);
  }
}

TEST(Curvature, SphereLoweredCurvatureIsConstantCurvatureForm) {
  // R_jklw = kappa (g_kw g_jl - g_jw g_kl) in the convention above.
  const double kappa = 1.0;
  const auto e = riemannian_space_form(3, kappa);
  for (const auto& p : samples(4, 13)) {
    const auto b = h_curvature(e.metric, p);
    const auto g = structural_frame(e.metric, p).g;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          for (int w = 0; w < 3; ++w)
            EXPECT_NEAR(b.R_lowered(j, k, l, w), kappa * (g(k, w) * g(j, l) - g(j, w) * g(k, l)), 1e-6);
  }
}

TEST(Curvature, BianchiCyclicSumVanishes) {
  for (const auto& e : {funk(3), riemannian_space_form(3, 1.0), perturbed_riemannian(3, 7)})
    for (const auto& p : samples(20, 14)) EXPECT_LT(bianchi_residual(e.metric, p), 1e-6) << e.name;
}

// ---------------------------------------------------------------------------
// Scalar curvature
// ---------------------------------------------------------------------------

TEST(ScalarClass, KnownValuesOfK) {
  for (const auto& p : samples(10, 15)) {
    EXPECT_EQ(extract_k(euclidean(3).metric, p), 0.0);
    EXPECT_NEAR(extract_k(funk(3).metric, p), -0.25, 1e-6);
    for (const double kappa : {-1.0, 0.0, 1.0})
      EXPECT_NEAR(extract_k(riemannian_space_form(3, kappa).metric, p), kappa, 1e-6);
  }
}

TEST(ScalarClass, SphereKMatchesOracleSectionalCurvature) {
  const auto orc = space_form_oracle(1.0);
  const SamplePoint p({0.1, 0.3, -0.2}, {0.4, -0.8, 1.1});
  EXPECT_NEAR(orc.sectional(p.x, {1.0, 0.2, 0.0}, p.y), extract_k(riemannian_space_form(3, 1.0).metric, p), 1e-6);
}

TEST(ScalarClass, IsotropyResidual) {
  int large = 0;
  const auto pts = samples(20, 16);
  for (const auto& p : pts) {
    EXPECT_EQ(isotropy_residual(euclidean(3).metric, p), 0.0);
    EXPECT_LT(isotropy_residual(funk(3).metric, p), 1e-7);
    EXPECT_LT(isotropy_residual(randers_pflat(3).metric, p), 1e-7);
    if (isotropy_residual(perturbed_riemannian(3, 7).metric, p) > 1e-2) ++large;
  }
  EXPECT_GT(large, static_cast<int>(pts.size()) / 2);
}

TEST(ScalarClass, PerturbedIsotropyConfirmedByOracle) {
  // The oracle's Jacobi operator is far from k L^2 phi.
  const auto e = perturbed_riemannian(3, 7);
  const auto orc = perturbed_oracle(3, 7);
  const SamplePoint p({0.2, -0.1, 0.05}, {0.6, 0.9, -0.3});
  const auto want = orc.jacobi(p.x, p.y);
  const auto f = structural_frame(e.metric, p);
  Tensor<double> H(3, {1, 1});
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) H(i, k) = want[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  double tr = 0.0;
  for (int i = 0; i < 3; ++i) tr += H(i, i);
  const double k = tr / (2.0 * f.L * f.L);
  EXPECT_GT(isotropy_residual(H, k, f.L, f.phi), 1e-2);
  EXPECT_NEAR(isotropy_residual(H, k, f.L, f.phi), isotropy_residual(e.metric, p), 1e-6);
}

TEST(ScalarClass, LadderVanishesOnConstantCurvature) {
  for (const auto& e : {euclidean(3), funk(3), riemannian_space_form(3, 1.0), riemannian_space_form(3, -1.0)})
    for (const auto& p : samples(5, 17)) {
      EXPECT_LT(frobenius_norm(tensor_C(e.metric, p)), 1e-7) << e.name;
      EXPECT_LT(frobenius_norm(tensor_B(e.metric, p)), 1e-7) << e.name;
      EXPECT_LT(frobenius_norm(tensor_A(e.metric, p)), 1e-7) << e.name;
    }
}

TEST(ScalarClass, LadderNonzeroOnRanders) {
  const auto e = randers_pflat(3);
  for (const auto& p : samples(5, 18)) {
    const auto d = scalar_data(e.metric, p);
    EXPECT_GT(frobenius_norm(d.C), 1e-3);
    EXPECT_GT(frobenius_norm(d.B), 1e-3);
    // C is L times the vertical derivative of k: contraction with y vanishes.
    EXPECT_NEAR(contract_slot(d.C, 0, std::span<const double>(p.y))[0], 0.0, 1e-12);
  }
}

TEST(ScalarClass, NAndFOnSimpleMetrics) {
  const SamplePoint p({0.1, 0.0, -0.2}, {0.5, 1.0, 0.25});
  const auto [N0, F0] = tensor_NF(euclidean(3).metric, p);
  EXPECT_EQ(max_abs(N0), 0.0);
  EXPECT_EQ(max_abs(F0), 0.0);
  const auto sphere = riemannian_space_form(3, 1.0);
  const auto [N, F] = tensor_NF(sphere.metric, p);
  const auto f = structural_frame(sphere.metric, p);
  EXPECT_LT(rel_diff(N, f.g + outer<double>(f.ell, f.ell)), 1e-9);
  EXPECT_LT(max_abs(F), 1e-9);
}

// ---------------------------------------------------------------------------
// Identity suites
// ---------------------------------------------------------------------------

TEST(Identities, TorsionAndCurvatureFormsOnScalarMetricsAndControl) {
  for (const auto& e : {funk(3), riemannian_space_form(3, 1.0), randers_pflat(3)})
    for (const auto& p : samples(5, 19)) {
      const auto r = check_theorem21(e.metric, p);
      EXPECT_LT(r.at("torsion.scalar_curvature_form"), 1e-6) << e.name;
      EXPECT_LT(r.at("curvature.scalar_curvature_form"), 1e-6) << e.name;
      EXPECT_LT(r.at("torsion.reconstruction_from_deviation"), 1e-6) << e.name;
    }
  const auto ctl = perturbed_riemannian(3, 7);
  for (const auto& p : samples(5, 19)) {
    const auto r = check_theorem21(ctl.metric, p);
    EXPECT_GT(r.at("torsion.scalar_curvature_form"), 1e-2);
    EXPECT_LT(r.at("torsion.reconstruction_from_deviation"), 1e-6);
    EXPECT_LT(r.at("curvature.eta_contraction_gives_torsion"), 1e-6);
  }
}

TEST(Identities, CurvatureSplitProjectionAndAExpansionOnRanders) {
  const auto e = randers_pflat(3);
  for (const auto& p : samples(5, 20)) {
    const auto c = check_corollary21(e.metric, p);
    for (const auto& [key, v] : c) EXPECT_LT(v, 1e-6) << key;
    const auto pr = check_prop21(e.metric, p);
    EXPECT_LT(pr.projected_form_residual, 1e-6);
    EXPECT_EQ(pr.PR_norm < 1e-7, pr.PN_norm < 1e-7);
    for (const auto& [key, v] : check_lemma31(e.metric, p)) EXPECT_LT(v, 1e-6) << key;
  }
}

TEST(Identities, ProjectedCurvatureOnSphereAndEuclidean) {
  const SamplePoint p({0.1, 0.2, 0.0}, {1.0, -0.5, 0.3});
  const auto s = check_prop21(riemannian_space_form(3, 1.0).metric, p);
  EXPECT_GT(s.PR_norm, 1e-3);
  EXPECT_GT(s.PN_norm, 1e-3);
  EXPECT_LT(s.projected_form_residual, 1e-6);
  const auto z = check_prop21(euclidean(3).metric, p);
  EXPECT_EQ(z.PR_norm, 0.0);
  EXPECT_EQ(z.PN_norm, 0.0);
}

TEST(Identities, EverySuiteRunsOnEveryCatalogMetric) {
  const Tolerances tol;
  for (const auto& e : catalog3()) {
    const auto d = analyze_jet(e.metric, samples(1, 21)[0]);
    for (const auto& s : suite_names()) {
      if (s == "classify") continue;
      std::vector<IdentityCheck> out;
      run_suite(s, d, tol, out);
      EXPECT_FALSE(out.empty()) << s;
      for (const auto& c : out) {
        EXPECT_EQ(c.suite, s);
        EXPECT_TRUE(std::isfinite(c.residual)) << c.key;
        // Universal identities hold on every metric.
        if (s == "lemma21" || s == "lemma22" || s == "lemma23" || s == "lemma31" || s == "bianchi" ||
            c.key == "torsion.reconstruction_from_deviation" || c.key == "curvature.eta_contraction_gives_torsion") {
          EXPECT_TRUE(c.passed()) << e.name << " " << c.key << " " << c.residual;
        }
      }
    }
  }
  std::vector<IdentityCheck> out;
  EXPECT_THROW(run_suite("nonsense", analyze_jet(euclidean(3).metric, samples(1)[0]), tol, out), ConfigError);
}

TEST(Identities, ToleranceOverrides) {
  Tolerances t = Tolerances::defaults(Backend::fd);
  EXPECT_EQ(t.curvature, 1e-3);
  t.set("curvature", 2e-3);
  EXPECT_EQ(t.curvature, 2e-3);
  EXPECT_THROW(t.set("curvature", 0.0), ConfigError);
  EXPECT_THROW(t.set("bogus", 1.0), ConfigError);
}

// ---------------------------------------------------------------------------
// Finite-difference backend
// ---------------------------------------------------------------------------

TEST(FdBackend, AgreesWithJetsOnFunk) {
  const auto e = funk(3);
  for (const auto& p : samples(2, 22)) {
    const auto j = analyze_jet(e.metric, p);
    const auto f = analyze_fd(e.metric, p);
    EXPECT_LT(rel_diff(j.frame.g, f.frame.g), 1e-6);
    EXPECT_LT(rel_diff(j.spray, f.spray), 1e-6);
    EXPECT_LT(rel_diff(j.nonlinear, f.nonlinear), 1e-5);
    EXPECT_LT(rel_diff(j.rhat, f.rhat), 1e-4);
    EXPECT_LT(rel_diff(j.deviation, f.deviation), 1e-4);
    EXPECT_NEAR(j.k, f.k, 1e-4);
    EXPECT_FALSE(f.has_ladder());
  }
}

TEST(FdBackend, SupportedSuitesPassWithinFdTolerance) {
  const Tolerances tol = Tolerances::defaults(Backend::fd);
  for (const auto& e : {riemannian_space_form(3, 1.0), randers_pflat(3)}) {
    const auto d = analyze_fd(e.metric, samples(1, 23)[0]);
    std::vector<IdentityCheck> out;
    for (const auto& s : {"lemma21", "bianchi"}) run_suite(s, d, tol, out);
    for (const auto& c : out) EXPECT_TRUE(c.passed()) << e.name << " " << c.key << " " << c.residual;
  }
  EXPECT_FALSE(suite_supported("lemma23", Backend::fd));
  EXPECT_TRUE(suite_supported("lemma23", Backend::jet));
}

// ---------------------------------------------------------------------------
// Catalog and classification
// ---------------------------------------------------------------------------

TEST(Catalog, EntriesAreHomogeneousAndPositive) {
  const auto pts = samples(20, 24);
  for (const auto& e : catalog3()) {
    EXPECT_LT(check_homogeneity(e.metric, pts), 1e-12) << e.name;
    for (const auto& p : pts) EXPECT_GT(e.metric.L(std::span<const double>(p.x), std::span<const double>(p.y)), 0.0);
  }
}

TEST(Catalog, LookupAndErrors) {
  EXPECT_EQ(make_catalog_entry("riemannian_space_form", 3, {{"kappa", -2.0}}).params.at("kappa"), -2.0);
  EXPECT_EQ(make_catalog_entry("perturbed_riemannian", 3).expected_verdict, Verdict::generic);
  EXPECT_THROW(make_catalog_entry("hilbert", 3), ConfigError);
  EXPECT_THROW(make_catalog_entry("funk", 3, {{"kappa", 1.0}}), ConfigError);
  EXPECT_THROW(make_catalog_entry("perturbed_riemannian", 3, {{"seed", 1.5}}), ConfigError);
  const auto f = funk(3);
  EXPECT_THROW(f.metric.require_valid(SamplePoint({1.2, 0.0, 0.0}, {1.0, 0.0, 0.0})), DomainError);
  EXPECT_THROW(analyze_jet(f.metric, SamplePoint({0.0, 0.0, 1.0}, {1.0, 0.0, 0.0})), DomainError);
  EXPECT_THROW(analyze_jet(f.metric, SamplePoint({0.0, 0.0}, {1.0, 0.0})), DomainError);
}

TEST(Classify, CatalogVerdictsReproduced) {
  SamplingSpec spec;
  spec.count = 12;
  spec.seed = 25;
  for (const auto& e : catalog3()) {
    const auto r = classify(e.metric, spec);
    EXPECT_EQ(r.verdict, e.expected_verdict) << e.name;
    if (e.expected_k && r.verdict == Verdict::constant) {
      EXPECT_NEAR(r.k_mean, *e.expected_k, 1e-6) << e.name;
    }
    EXPECT_TRUE(r.ladder_checked);
  }
}

TEST(Classify, FunkFiftySamples) {
  SamplingSpec spec;
  spec.count = 50;
  spec.seed = 26;
  const auto r = classify(funk(3).metric, spec);
  EXPECT_EQ(r.verdict, Verdict::constant);
  EXPECT_NEAR(r.k_mean, -0.25, 1e-6);
  EXPECT_LT(r.k_stdev, 1e-6);
  EXPECT_EQ(r.samples.size(), 50u);
}

TEST(Classify, RandersIsScalarNotConstant) {
  SamplingSpec spec;
  spec.count = 10;
  const auto r = classify(randers_pflat(3).metric, spec);
  EXPECT_EQ(r.verdict, Verdict::scalar);
  EXPECT_GT(r.residuals.at("C.norm_max").value, 1e-3);
}

TEST(Classify, FdBackendSkipsLadder) {
  SamplingSpec spec;
  spec.count = 3;
  const auto r = classify(funk(3).metric, spec, Backend::fd, Tolerances::defaults(Backend::fd));
  EXPECT_EQ(r.verdict, Verdict::constant);
  EXPECT_FALSE(r.ladder_checked);
  EXPECT_EQ(r.residuals.count("B.norm_max"), 0u);
}

TEST(Classify, DimensionTwoRejected) {
  SamplingSpec spec;
  spec.count = 2;
  EXPECT_THROW(classify(funk(2).metric, spec), DimensionTooSmall);
}

TEST(Classify, ThreadCountDoesNotChangeResults) {
  SamplingSpec spec;
  spec.count = 6;
  const auto a = classify(randers_pflat(3).metric, spec, Backend::jet, {}, 1);
  const auto b = classify(randers_pflat(3).metric, spec, Backend::jet, {}, 3);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_EQ(a.samples[i].k, b.samples[i].k);
  EXPECT_EQ(a.k_mean, b.k_mean);
}

TEST(Classify, InconsistentCriteriaRaise) {
  // A spread tolerance loose enough to call Randers' k constant, while C is clearly nonzero.
  SamplingSpec spec;
  spec.count = 4;
  Tolerances tol;
  tol.k_spread = 1.0;
  EXPECT_THROW(classify(randers_pflat(3).metric, spec, Backend::jet, tol), InternalInconsistency);
}
