#pragma once

// Run configuration, commands and line-delimited JSON reports behind the
// command-line tool. Everything here writes to caller-supplied streams so the
// commands can be exercised in-process.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/catalog.hpp"
#include "finsler/classify.hpp"
#include "finsler/dsl.hpp"
#include "finsler/error.hpp"
#include "finsler/identities.hpp"
#include "finsler/metric.hpp"
#include "finsler/parallel.hpp"
#include "finsler/point_data.hpp"
#include "finsler/sample.hpp"

namespace finsler {

inline constexpr const char* kToolName = "finsler";
inline constexpr const char* kToolVersion = "1.0.0";

using json = nlohmann::ordered_json;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int identity_failure = 1;
inline constexpr int config_error = 2;
inline constexpr int runtime_error = 3;
}  // namespace exit_code

/// A per-sample failure, carrying the point that triggered it.
class SampleFailure : public Error {
 public:
  SampleFailure(std::size_t index, SamplePoint point, std::string kind, const std::string& what)
      : Error("sample " + std::to_string(index) + " (" + describe(point) + "): " + what),
        index_(index),
        point_(std::move(point)),
        kind_(std::move(kind)) {}
  std::size_t index() const noexcept { return index_; }
  const SamplePoint& point() const noexcept { return point_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::size_t index_;
  SamplePoint point_;
  std::string kind_;
};

struct MetricSource {
  std::optional<std::string> catalog;
  std::optional<std::string> expression;
  int dimension = 3;
  std::map<std::string, double> params;
  std::string name;                    // defaults to the catalog key, or "custom"
  std::optional<double> domain_ball;   // expression metrics only
};

struct RunConfig {
  MetricSource metric;
  SamplingSpec sampling;
  Backend backend = Backend::jet;
  std::map<std::string, double> tolerance_overrides;
  std::optional<std::vector<std::string>> suites;  // absent means every suite the backend supports
  std::string output;                              // empty means standard output
  unsigned threads = 0;

  Tolerances tolerances() const {
    Tolerances t = Tolerances::defaults(backend);
    for (const auto& [k, v] : tolerance_overrides) t.set(k, v);
    return t;
  }

  std::vector<std::string> effective_suites() const {
    if (suites) return *suites;
    std::vector<std::string> all;
    for (const auto& s : suite_names())
      if (suite_supported(s, backend)) all.push_back(s);
    return all;
  }

  /// Echo written into report headers. The output path and thread count are
  /// left out: neither changes the results.
  json echo() const {
    json m = json::object();
    if (metric.catalog) m["catalog"] = *metric.catalog;
    if (metric.expression) m["expression"] = *metric.expression;
    m["name"] = metric.name;
    m["dimension"] = metric.dimension;
    m["params"] = json::object();
    for (const auto& [k, v] : metric.params) m["params"][k] = v;
    if (metric.domain_ball) m["domain"] = {{"ball", *metric.domain_ball}};
    json tol = json::object();
    const Tolerances t = tolerances();
    tol["structural"] = t.structural;
    tol["curvature"] = t.curvature;
    tol["isotropy"] = t.isotropy;
    tol["vanishing"] = t.vanishing;
    tol["k_spread"] = t.k_spread;
    return {{"metric", m},
            {"sampling", {{"count", sampling.count}, {"seed", sampling.seed}, {"radius", sampling.radius}}},
            {"backend", to_string(backend)},
            {"tolerances", tol},
            {"suites", effective_suites()}};
  }
};

namespace detail {

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": wrong type (" + std::string(j.type_name()) + ")");
  }
}

inline void validate_suites(const std::vector<std::string>& suites, Backend backend) {
  if (suites.empty()) throw ConfigError("suites: at least one suite is required");
  for (const auto& s : suites) {
    bool known = false;
    for (const auto& n : suite_names()) known = known || n == s;
    if (!known) throw ConfigError("suites: unknown suite '" + s + "'");
    if (!suite_supported(s, backend))
      throw ConfigError("suites: '" + s + "' needs derivatives the " + std::string(to_string(backend)) +
                        " backend cannot deliver");
  }
}

}  // namespace detail

/// Re-checks the cross-field invariants, e.g. after command-line overrides.
inline void validate(const RunConfig& c) {
  if (c.sampling.count < 1) throw ConfigError("sampling.count must be at least 1");
  if (!(c.sampling.radius > 0.0) || !std::isfinite(c.sampling.radius))
    throw ConfigError("sampling.radius must be positive");
  if (c.metric.dimension < 1) throw ConfigError("metric.dimension must be positive");
  (void)c.tolerances();
  if (c.suites) detail::validate_suites(*c.suites, c.backend);
  else detail::validate_suites(c.effective_suites(), c.backend);
}

inline RunConfig parse_config(const json& j) {
  using detail::get_as;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::reject_unknown_keys(j, {"metric", "sampling", "backend", "tolerances", "suites", "output", "threads"},
                              "config");
  RunConfig c;
  if (!j.contains("metric")) throw ConfigError("config: 'metric' is required");
  const json& m = j.at("metric");
  if (!m.is_object()) throw ConfigError("metric: must be an object");
  detail::reject_unknown_keys(m, {"catalog", "expression", "dimension", "params", "name", "domain"}, "metric");
  if (m.contains("catalog")) c.metric.catalog = get_as<std::string>(m.at("catalog"), "metric.catalog");
  if (m.contains("expression")) c.metric.expression = get_as<std::string>(m.at("expression"), "metric.expression");
  if (c.metric.catalog.has_value() == c.metric.expression.has_value())
    throw ConfigError("metric: give exactly one of 'catalog' or 'expression'");
  if (m.contains("dimension")) c.metric.dimension = get_as<int>(m.at("dimension"), "metric.dimension");
  else if (c.metric.expression) throw ConfigError("metric: 'dimension' is required with 'expression'");
  if (m.contains("params")) {
    const json& p = m.at("params");
    if (!p.is_object()) throw ConfigError("metric.params: must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!it.value().is_number()) throw ConfigError("metric.params." + it.key() + ": must be a number");
      c.metric.params[it.key()] = it.value().get<double>();
    }
  }
  c.metric.name = m.contains("name") ? get_as<std::string>(m.at("name"), "metric.name")
                                     : c.metric.catalog.value_or("custom");
  if (m.contains("domain")) {
    if (c.metric.catalog) throw ConfigError("metric.domain: catalog metrics carry their own domain");
    const json& d = m.at("domain");
    if (!d.is_object()) throw ConfigError("metric.domain: must be an object");
    detail::reject_unknown_keys(d, {"ball"}, "metric.domain");
    if (d.contains("ball")) {
      const double r = get_as<double>(d.at("ball"), "metric.domain.ball");
      if (!(r > 0.0)) throw ConfigError("metric.domain.ball must be positive");
      c.metric.domain_ball = r;
    }
  }

  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    if (!s.is_object()) throw ConfigError("sampling: must be an object");
    detail::reject_unknown_keys(s, {"count", "seed", "radius"}, "sampling");
    if (s.contains("count")) c.sampling.count = get_as<int>(s.at("count"), "sampling.count");
    if (s.contains("seed")) c.sampling.seed = get_as<std::uint64_t>(s.at("seed"), "sampling.seed");
    if (s.contains("radius")) c.sampling.radius = get_as<double>(s.at("radius"), "sampling.radius");
  }
  if (j.contains("backend")) c.backend = parse_backend(get_as<std::string>(j.at("backend"), "backend"));
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) throw ConfigError("tolerances: must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!it.value().is_number()) throw ConfigError("tolerances." + it.key() + ": must be a number");
      c.tolerance_overrides[it.key()] = it.value().get<double>();
    }
  }
  if (j.contains("suites")) c.suites = get_as<std::vector<std::string>>(j.at("suites"), "suites");
  if (j.contains("output")) c.output = get_as<std::string>(j.at("output"), "output");
  if (j.contains("threads")) c.threads = get_as<unsigned>(j.at("threads"), "threads");
  validate(c);
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

struct LoadedMetric {
  FinslerMetric metric;
  std::optional<Verdict> expected_verdict;
  std::optional<double> expected_k;
};

inline LoadedMetric load_metric(const MetricSource& src) {
  if (src.catalog) {
    CatalogEntry e = make_catalog_entry(*src.catalog, src.dimension, src.params);
    e.metric.name = src.name;
    return {std::move(e.metric), e.expected_verdict, e.expected_k};
  }
  const MetricAst ast = parse_metric(*src.expression, src.dimension, src.params);
  ChartDomain domain = src.domain_ball ? ChartDomain::ball(*src.domain_ball) : ChartDomain{};
  return {metric_from_ast(src.name, ast, std::move(domain)), std::nullopt, std::nullopt};
}

namespace detail {

inline json point_json(const SamplePoint& p) { return {{"x", p.x}, {"y", p.y}}; }

inline json tensor_json(const Tensor<double>& t) {
  // Nested arrays, first index outermost.
  const int n = t.dim();
  std::function<json(std::size_t, int)> build = [&](std::size_t base, int depth) -> json {
    if (depth == t.rank()) return t[base];
    json a = json::array();
    for (int i = 0; i < n; ++i) a.push_back(build(base * static_cast<std::size_t>(n) + static_cast<std::size_t>(i), depth + 1));
    return a;
  };
  return build(0, 0);
}

inline json optional_tensor_json(const std::optional<Tensor<double>>& t) {
  return t ? tensor_json(*t) : json(nullptr);
}

inline const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const HomogeneityError*>(&e)) return "HomogeneityError";
  if (dynamic_cast<const EvalDomainError*>(&e)) return "EvalDomainError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const DegenerateMetric*>(&e)) return "DegenerateMetric";
  if (dynamic_cast<const StepTooSmall*>(&e)) return "StepTooSmall";
  if (dynamic_cast<const OrderUnsupported*>(&e)) return "OrderUnsupported";
  if (dynamic_cast<const InternalInconsistency*>(&e)) return "InternalInconsistency";
  if (dynamic_cast<const DimensionTooSmall*>(&e)) return "DimensionTooSmall";
  if (dynamic_cast<const UnknownIdentifier*>(&e)) return "UnknownIdentifier";
  if (dynamic_cast<const ArityError*>(&e)) return "ArityError";
  if (dynamic_cast<const IndexOutOfRange*>(&e)) return "IndexOutOfRange";
  if (dynamic_cast<const SyntaxError*>(&e)) return "SyntaxError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  return "Error";
}

inline void emit(std::ostream& out, const json& record) { out << record.dump() << '\n'; }

inline json header(const std::string& command, const RunConfig& c) {
  return {{"record", "header"}, {"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"config", c.echo()}};
}

struct Prepared {
  LoadedMetric metric;
  std::vector<SamplePoint> points;
};

// Loads the metric, draws the samples and runs the Euler check on them.
inline Prepared prepare(const RunConfig& c) {
  Prepared p{load_metric(c.metric), draw_samples(c.metric.dimension, c.sampling)};
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    try {
      check_homogeneity(p.metric.metric, std::span<const SamplePoint>(&p.points[i], 1));
    } catch (const Error& e) {
      throw SampleFailure(i, p.points[i], error_kind(e), e.what());
    }
  }
  return p;
}

inline std::vector<PointData> analyze_all(const Prepared& p, Backend backend, unsigned threads) {
  return parallel_map(
      p.points.size(),
      [&](std::size_t i) {
        try {
          return analyze(p.metric.metric, p.points[i], backend);
        } catch (const Error& e) {
          throw SampleFailure(i, p.points[i], error_kind(e), e.what());
        }
      },
      threads);
}

inline std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

}  // namespace detail

/// One-line verdict as printed by the classify command.
inline std::string verdict_line(const ClassificationReport& r) {
  return r.metric + ": " + to_string(r.verdict) + " (k=" + detail::fixed4(r.k_mean) + "±" + detail::fixed4(r.k_stdev) +
         ")";
}

inline int cmd_tensors(const RunConfig& c, std::ostream& report) {
  const auto prepared = detail::prepare(c);
  const auto data = detail::analyze_all(prepared, c.backend, c.threads);
  detail::emit(report, detail::header("tensors", c));
  double kmin = INFINITY, kmax = -INFINITY;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PointData& d = data[i];
    json r = {{"record", "sample"}, {"index", i}};
    r["point"] = detail::point_json(d.point);
    r["L"] = d.frame.L;
    r["g"] = detail::tensor_json(d.frame.g);
    r["G"] = detail::tensor_json(d.spray);
    r["N"] = detail::tensor_json(d.nonlinear);
    r["Gamma"] = detail::tensor_json(d.berwald);
    r["Rhat"] = detail::tensor_json(d.rhat);
    r["H"] = detail::tensor_json(d.deviation);
    r["k"] = d.k;
    r["C"] = detail::tensor_json(d.C);
    r["B"] = detail::optional_tensor_json(d.B);
    r["A"] = detail::optional_tensor_json(d.A);
    detail::emit(report, r);
    kmin = std::min(kmin, d.k);
    kmax = std::max(kmax, d.k);
  }
  detail::emit(report, {{"record", "summary"}, {"samples", data.size()}, {"k_min", kmin}, {"k_max", kmax}});
  return exit_code::ok;
}

namespace detail {

struct IdentitySummary {
  std::string suite, identity;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t checks = 0, failures = 0;
};

// Metric-level checks behind the "classify" suite.
inline std::vector<IdentityCheck> classify_checks(const RunConfig& c, const LoadedMetric& m,
                                                  const std::vector<PointData>& data, const Tolerances& tol) {
  std::vector<IdentityCheck> out;
  auto add = [&](const std::string& key, double residual, double tolerance) {
    out.push_back({"classify", key, residual, tolerance});
  };
  ClassificationReport r;
  try {
    r = classify_points(m.metric.name, m.metric.dim(), data, c.sampling.seed, c.backend, tol);
  } catch (const InternalInconsistency&) {
    add("classify.criteria_consistent", 1.0, 0.5);
    return out;
  }
  add("classify.criteria_consistent", 0.0, 0.5);
  if (m.expected_verdict) add("classify.verdict_matches_catalog", r.verdict == *m.expected_verdict ? 0.0 : 1.0, 0.5);
  if (m.expected_k && r.verdict == Verdict::constant)
    add("classify.k_matches_catalog", std::abs(r.k_mean - *m.expected_k) / (1.0 + std::abs(*m.expected_k)),
        tol.curvature);
  // Per sample: constant verdict, vanishing C, B and A all agree.
  std::size_t disagree = 0;
  const bool constant = r.verdict == Verdict::constant;
  for (const auto& s : r.samples) {
    bool all = s.C_norm < tol.vanishing;
    bool ok = all == constant;
    if (!std::isnan(s.B_norm)) ok = ok && (s.B_norm < tol.vanishing) == constant;
    if (!std::isnan(s.A_norm)) ok = ok && (s.A_norm < tol.vanishing) == constant;
    if (!ok) ++disagree;
  }
  if (r.verdict != Verdict::generic)
    add("classify.constancy_criteria_agree", static_cast<double>(disagree) / static_cast<double>(r.samples.size()),
        0.5 / static_cast<double>(r.samples.size()));
  return out;
}

}  // namespace detail

inline int cmd_verify(const RunConfig& c, std::ostream& report) {
  const auto suites = c.effective_suites();
  detail::validate_suites(suites, c.backend);
  const Tolerances tol = c.tolerances();
  const auto prepared = detail::prepare(c);
  const auto data = detail::analyze_all(prepared, c.backend, c.threads);

  detail::emit(report, detail::header("verify", c));
  for (std::size_t i = 0; i < prepared.points.size(); ++i)
    detail::emit(report, {{"record", "sample"}, {"index", i}, {"point", detail::point_json(prepared.points[i])}});

  std::vector<detail::IdentitySummary> summary;
  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  std::size_t failures = 0, total = 0;
  auto record = [&](const IdentityCheck& chk, std::optional<std::size_t> sample) {
    json r = {{"record", "residual"}, {"suite", chk.suite}, {"identity", chk.key}};
    r["sample"] = sample ? json(*sample) : json(nullptr);
    r["residual"] = chk.residual;
    r["tolerance"] = chk.tolerance;
    r["passed"] = chk.passed();
    detail::emit(report, r);
    const auto key = std::make_pair(chk.suite, chk.key);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, summary.size()).first;
      summary.push_back({chk.suite, chk.key, 0.0, chk.tolerance, 0, 0});
    }
    auto& s = summary[it->second];
    s.max_residual = std::max(s.max_residual, chk.residual);
    ++s.checks;
    ++total;
    if (!chk.passed()) {
      ++s.failures;
      ++failures;
    }
  };

  for (std::size_t i = 0; i < data.size(); ++i) {
    std::vector<IdentityCheck> checks;
    for (const auto& s : suites)
      if (s != "classify") run_suite(s, data[i], tol, checks);
    for (const auto& chk : checks) record(chk, i);
  }
  for (const auto& s : suites)
    if (s == "classify")
      for (const auto& chk : detail::classify_checks(c, prepared.metric, data, tol)) record(chk, std::nullopt);

  json ids = json::array();
  for (const auto& s : summary)
    ids.push_back({{"suite", s.suite},
                   {"identity", s.identity},
                   {"max_residual", s.max_residual},
                   {"tolerance", s.tolerance},
                   {"checks", s.checks},
                   {"failures", s.failures}});
  detail::emit(report, {{"record", "summary"},
                        {"passed", failures == 0},
                        {"checks", total},
                        {"failures", failures},
                        {"identities", ids}});
  return failures == 0 ? exit_code::ok : exit_code::identity_failure;
}

/// Prints the verdict line to `console` and the full report to `report`.
inline int cmd_classify(const RunConfig& c, std::ostream& report, std::ostream& console) {
  const Tolerances tol = c.tolerances();
  const auto prepared = detail::prepare(c);
  if (prepared.metric.metric.dim() < 3)
    throw DimensionTooSmall(prepared.metric.metric.name + ": classification needs dimension >= 3");
  const auto data = detail::analyze_all(prepared, c.backend, c.threads);
  const ClassificationReport r =
      classify_points(prepared.metric.metric.name, prepared.metric.metric.dim(), data, c.sampling.seed, c.backend, tol);

  detail::emit(report, detail::header("classify", c));
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    json rec = {{"record", "sample"}, {"index", i}, {"point", detail::point_json(r.points[i])}};
    rec["k"] = s.k;
    rec["isotropy_residual"] = s.isotropy;
    rec["C_norm"] = s.C_norm;
    rec["B_norm"] = std::isnan(s.B_norm) ? json(nullptr) : json(s.B_norm);
    rec["A_norm"] = std::isnan(s.A_norm) ? json(nullptr) : json(s.A_norm);
    detail::emit(report, rec);
  }
  json res = json::object();
  for (const auto& [k, v] : r.residuals) res[k] = {{"value", v.value}, {"tolerance", v.tolerance}};
  detail::emit(report, {{"record", "summary"},
                        {"metric", r.metric},
                        {"verdict", to_string(r.verdict)},
                        {"k_mean", r.k_mean},
                        {"k_stdev", r.k_stdev},
                        {"samples", r.samples.size()},
                        {"ladder_checked", r.ladder_checked},
                        {"residuals", res}});
  console << verdict_line(r) << '\n';
  return exit_code::ok;
}

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionTooSmall*>(&e))
    return exit_code::config_error;
  if (dynamic_cast<const InternalInconsistency*>(&e)) return exit_code::identity_failure;
  return exit_code::runtime_error;
}

/// Runs a command and maps failures to exit codes. Errors go to `err` and,
/// as an error record, to the report.
inline int run_command(const std::string& command, const RunConfig& c, std::ostream& report, std::ostream& console,
                       std::ostream& err) {
  try {
    validate(c);
    if (command == "tensors") return cmd_tensors(c, report);
    if (command == "verify") return cmd_verify(c, report);
    if (command == "classify") return cmd_classify(c, report, console);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const std::exception& e) {
    json rec = {{"record", "error"}, {"kind", detail::error_kind(e)}, {"message", e.what()}};
    if (const auto* s = dynamic_cast<const SampleFailure*>(&e)) {
      rec["kind"] = s->kind();
      rec["sample"] = s->index();
      rec["point"] = detail::point_json(s->point());
    }
    detail::emit(report, rec);
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace finsler
