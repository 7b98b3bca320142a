#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "finsler/finsler.hpp"

using namespace finsler;

namespace {

const char* kFunkSource = "(sqrt((1-norm2(x))*norm2(y)+dot(x,y)^2)+dot(x,y))/(1-norm2(x))";

double eval_at(const MetricAst& m, std::vector<double> x, std::vector<double> y) {
  return eval_ast(m, std::span<const double>(x), std::span<const double>(y));
}

template <class E>
SourceLocation location_of(const std::string& src, int n = 3, const std::map<std::string, double>& params = {}) {
  try {
    parse_metric(src, n, params);
  } catch (const E& e) {
    return e.location();
  }
  ADD_FAILURE() << "no error for '" << src << "'";
  return {};
}

}  // namespace

TEST(DslParse, EuclideanAndEvaluation) {
  const auto m = parse_metric("sqrt(norm2(y))", 3);
  EXPECT_DOUBLE_EQ(eval_at(m, {0, 0, 0}, {3, 4, 0}), 5.0);
}

TEST(DslParse, FunkAtOriginReducesToNorm) {
  const auto m = parse_metric(kFunkSource, 3);
  EXPECT_DOUBLE_EQ(eval_at(m, {0, 0, 0}, {1, 0, 0}), 1.0);
}

TEST(DslParse, PrecedenceAndAssociativity) {
  const auto m = parse_metric("2^3^2", 1);
  EXPECT_DOUBLE_EQ(eval_at(m, {0}, {1}), 64.0);  // (2^3)^2
  EXPECT_DOUBLE_EQ(eval_at(parse_metric("-2^2", 1), {0}, {1}), -4.0);
  EXPECT_DOUBLE_EQ(eval_at(parse_metric("1-2-3", 1), {0}, {1}), -4.0);
  EXPECT_DOUBLE_EQ(eval_at(parse_metric("8/4/2", 1), {0}, {1}), 1.0);
  EXPECT_DOUBLE_EQ(eval_at(parse_metric("1+2*3^2", 1), {0}, {1}), 19.0);
  EXPECT_DOUBLE_EQ(eval_at(parse_metric(" y1 ^ -1 ", 1), {0}, {4}), 0.25);
  EXPECT_DOUBLE_EQ(eval_at(parse_metric("pow(y1, 3/2)", 1), {0}, {4}), 8.0);
  EXPECT_DOUBLE_EQ(eval_at(parse_metric("dot(x,y) + norm2(x)", 2), {1, 2}, {3, 4}), 11.0 + 5.0);
}

TEST(DslParse, NamedParameters) {
  const auto m = parse_metric("sqrt(norm2(y))/(1+kappa/4*norm2(x))", 3, {{"kappa", -1.0}});
  EXPECT_DOUBLE_EQ(eval_at(m, {1, 0, 0}, {0, 2, 0}), 2.0 / 0.75);
  EXPECT_THROW(parse_metric("kappa*y1", 3), UnknownIdentifier);
}

TEST(DslErrors, UnclosedCallReportsPositionFive) {
  const auto loc = location_of<SyntaxError>("sqrt(");
  EXPECT_EQ(loc.position, 5u);
  EXPECT_EQ(loc.line, 1);
  EXPECT_EQ(loc.column, 6);
}

TEST(DslErrors, KindsAndLocations) {
  EXPECT_EQ(location_of<UnknownIdentifier>("y1 + foo").column, 6);
  EXPECT_EQ(location_of<UnknownIdentifier>("bar(y1)").column, 1);
  EXPECT_EQ(location_of<ArityError>("sqrt(y1, y2)").column, 1);
  EXPECT_EQ(location_of<ArityError>("dot(x)").column, 1);
  EXPECT_EQ(location_of<IndexOutOfRange>("y1 +\n  x4").line, 2);
  EXPECT_EQ(location_of<IndexOutOfRange>("y1 +\n  x4").column, 3);
  EXPECT_EQ(location_of<IndexOutOfRange>("y0").column, 1);
  EXPECT_EQ(location_of<SyntaxError>("y1 ^ x1").column, 6);
  EXPECT_EQ(location_of<SyntaxError>("y1 $ 2").column, 4);
  EXPECT_EQ(location_of<SyntaxError>("norm2(z)").column, 7);
  EXPECT_THROW(parse_metric("(y1", 3), SyntaxError);
  EXPECT_THROW(parse_metric("", 3), SyntaxError);
  EXPECT_THROW(parse_metric("1e999", 3), SyntaxError);
  // Every DSL error is a configuration error.
  EXPECT_THROW(parse_metric("x9", 3), ConfigError);
}

TEST(DslEval, DomainErrorsCarryTheSubexpression) {
  const auto m = parse_metric("sqrt(y1 - 5) + y2", 2);
  try {
    eval_at(m, {0, 0}, {1, 1});
    FAIL();
  } catch (const EvalDomainError& e) {
    EXPECT_EQ(e.subexpression(), "sqrt((y1-5))");
  }
  EXPECT_THROW(eval_at(parse_metric("y1/(x1-x1)", 1), {0.3}, {1}), EvalDomainError);
  EXPECT_THROW(eval_at(parse_metric("(x1-1)^0.5", 1), {0.3}, {1}), EvalDomainError);
  EXPECT_THROW(eval_at(parse_metric("x1^-1", 1), {0.0}, {1}), EvalDomainError);
  // EvalDomainError is a runtime domain error, not a configuration error.
  EXPECT_THROW(eval_at(parse_metric("1/x1", 1), {0.0}, {1}), DomainError);
}

TEST(DslRoundTrip, PrintParsePrintIsStable) {
  const std::vector<std::string> sources{
      kFunkSource,
      "sqrt(norm2(y))/(1+kappa/4*norm2(x))",
      "-y1^2 - -x2*3.25e-3 + pow(norm2(y), 0.5)",
      "0.1 + 1e-5*dot(y,x) + 2^-1^2",
      "((((y1))))/7"};
  for (const auto& src : sources) {
    const auto a = parse_metric(src, 2, {{"kappa", 0.3}});
    const std::string printed = print_ast(a.root);
    const auto b = parse_metric(printed, 2, {{"kappa", 0.3}});
    EXPECT_TRUE(structurally_equal(a.root, b.root)) << src << " -> " << printed;
    EXPECT_EQ(print_ast(b.root), printed);
  }
}

TEST(DslEval, JetsComposeTransparently) {
  // d/dy1 of sqrt(norm2(y)) at y = (3, 4) is 3/5.
  const auto m = parse_metric("sqrt(norm2(y))", 2);
  const JetSpace& s = JetSpace::get(2, 2);
  std::vector<Jet> x{Jet(0.0), Jet(0.0)};
  std::vector<Jet> y{Jet::variable(s, 0, 3.0), Jet::variable(s, 1, 4.0)};
  const Jet v = eval_ast<Jet>(m.root, std::span<const Jet>(x), std::span<const Jet>(y));
  EXPECT_DOUBLE_EQ(v.value(), 5.0);
  EXPECT_NEAR(v.derivative(std::vector<int>{1, 0}), 0.6, 1e-15);
  EXPECT_NEAR(v.derivative(std::vector<int>{1, 1}), -12.0 / 125.0, 1e-15);
}

TEST(DslEval, FunkIsPositivelyHomogeneous) {
  const auto m = parse_metric(kFunkSource, 3);
  SamplingSpec spec;
  spec.count = 20;
  for (const auto& p : draw_samples(3, spec)) {
    std::vector<double> y2 = p.y;
    for (auto& v : y2) v *= 2.0;
    EXPECT_NEAR(eval_at(m, p.x, y2), 2.0 * eval_at(m, p.x, p.y), 1e-13);
  }
}

TEST(DslCatalog, ExpressibleEntriesMatchNativeImplementations) {
  SamplingSpec spec;
  spec.count = 100;
  spec.seed = 99;
  const auto points = draw_samples(3, spec);
  for (const auto& name : catalog_names()) {
    for (const double kappa : {1.0, -1.0, 0.0}) {
      if (name != "riemannian_space_form" && kappa != 1.0) continue;
      const std::map<std::string, double> params =
          name == "riemannian_space_form" ? std::map<std::string, double>{{"kappa", kappa}} : std::map<std::string, double>{};
      const auto entry = make_catalog_entry(name, 3, params);
      if (!entry.dsl_source) continue;
      const auto ast = parse_metric(*entry.dsl_source, 3, entry.params);
      for (const auto& p : points) {
        const double native = entry.metric.L(std::span<const double>(p.x), std::span<const double>(p.y));
        const double dsl = eval_at(ast, p.x, p.y);
        EXPECT_LE(std::abs(native - dsl), 1e-12 * std::abs(native)) << name;
      }
    }
  }
}

TEST(DslCatalog, FunkThroughTheDslHasConstantCurvature) {
  const auto ast = parse_metric(kFunkSource, 3);
  const auto metric = metric_from_ast("funk_dsl", ast, ChartDomain::ball(1.0));
  SamplingSpec spec;
  spec.count = 10;
  for (const auto& p : draw_samples(3, spec)) EXPECT_NEAR(extract_k(metric, p), -0.25, 1e-10);
}

TEST(DslHomogeneity, NonHomogeneousMetricRejected) {
  const auto metric = metric_from_ast("energy", parse_metric("norm2(y)", 3));
  SamplingSpec spec;
  spec.count = 3;
  const auto points = draw_samples(3, spec);
  EXPECT_THROW(check_homogeneity(metric, points), HomogeneityError);
  const auto ok = metric_from_ast("norm", parse_metric("sqrt(norm2(y)) + 0.2*dot(x,y)", 3));
  EXPECT_LT(check_homogeneity(ok, points), 1e-14);
}
