#include "cconvex/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "cconvex/bounds.hpp"
#include "cconvex/parallel.hpp"
#include "cconvex/reference_metrics.hpp"

namespace cconvex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError(where + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

bool has_check(const Scenario& s, const std::string& name) {
  return std::find(s.checks.begin(), s.checks.end(), name) != s.checks.end();
}

std::vector<ComplexVector> parse_points(const Json& j, const Domain& domain, std::uint64_t seed) {
  std::vector<ComplexVector> points;
  if (j.is_array()) {
    for (const auto& p : j) points.push_back(vector_from_json(p));
  } else if (j.is_object() && j.contains("boundary_approach")) {
    const auto& g = j.at("boundary_approach");
    const ComplexVector anchor = vector_from_json(require(g, "anchor", "points.boundary_approach"));
    const ComplexVector direction = vector_from_json(require(g, "direction", "points.boundary_approach"));
    if (anchor.size() != direction.size()) throw SchemaError("points.boundary_approach: anchor/direction sizes differ");
    for (const auto& d : require(g, "deltas", "points.boundary_approach")) {
      points.push_back(anchor + d.get<double>() * direction);
    }
  } else if (j.is_object() && j.contains("sample")) {
    const auto count = j.at("sample").get<std::size_t>();
    if (count == 0) throw SchemaError("points.sample: count must be positive");
    if (!symmetry(domain).is_bounded) throw SchemaError("points.sample: domain must be bounded");
    points = sample_uniform(domain, count, seed ^ 0x706f696e7473ULL).points;
  } else {
    throw SchemaError("points: expected a list, {\"boundary_approach\": ...} or {\"sample\": count}");
  }
  if (points.empty()) throw SchemaError("points: no points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != domain.dim()) throw SchemaError("points[" + std::to_string(i) + "]: dimension mismatch");
    if (!contains(domain, points[i])) throw SchemaError("points[" + std::to_string(i) + "]: not in the domain");
  }
  return points;
}

std::vector<ComplexVector> parse_vectors(const Json& j, Eigen::Index dim, std::uint64_t seed) {
  std::vector<ComplexVector> vectors;
  if (j.is_array()) {
    for (const auto& v : j) vectors.push_back(vector_from_json(v));
  } else if (j.is_object() && j.contains("sphere")) {
    const auto count = j.at("sphere").get<std::size_t>();
    std::mt19937_64 rng(seed ^ 0x766563746f7273ULL);
    for (std::size_t i = 0; i < count; ++i) vectors.push_back(random_unit_vector(dim, rng));
  } else {
    throw SchemaError("vectors: expected a list or {\"sphere\": count}");
  }
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim) throw SchemaError("vectors[" + std::to_string(i) + "]: dimension mismatch");
    if (vectors[i].isZero(0.0)) throw SchemaError("vectors[" + std::to_string(i) + "]: zero vector");
  }
  return vectors;
}

Numerics parse_numerics(const Json& j) {
  Numerics n;
  if (j.is_null()) return n;
  if (!j.is_object()) throw SchemaError("numerics: expected an object");
  if (j.contains("degree")) n.degree = j.at("degree").get<int>();
  if (j.contains("mode")) n.mode = gram_mode_from_string(j.at("mode").get<std::string>());
  if (j.contains("samples")) n.samples = j.at("samples").get<std::size_t>();
  if (j.contains("seed")) n.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("inclusion_samples")) n.inclusion_samples = j.at("inclusion_samples").get<std::size_t>();
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    if (t.contains("closed_form")) n.tolerances.closed_form = t.at("closed_form").get<double>();
    if (t.contains("sigmas")) n.tolerances.sigmas = t.at("sigmas").get<double>();
    if (t.contains("relative")) n.tolerances.relative = t.at("relative").get<double>();
  }
  if (n.degree > kMaxGramDegree) throw SchemaError("numerics.degree: at most 12");
  if (n.samples == 0) throw SchemaError("numerics.samples: must be positive");
  return n;
}

bool vector_quantity(const std::string& q) {
  static const std::vector<std::string> v{"gamma", "kappa", "gamma_d", "kappa_d", "directional_distance",
                                          "metric_B", "metric_numeric_B", "metric_numeric_M"};
  return std::find(v.begin(), v.end(), q) != v.end();
}

bool numeric_quantity(const std::string& q) {
  return q == "kernel_numeric" || q == "kernel_numeric_p2" || q == "metric_numeric_B" || q == "metric_numeric_M";
}

// True when some requested value has to come from the numerical Bergman engine.
bool needs_gram(const Scenario& s) {
  auto any_expect = [&](auto pred) { return std::any_of(s.expectations.begin(), s.expectations.end(), pred); };
  if (any_expect([](const Expectation& e) { return numeric_quantity(e.quantity); })) return true;
  const bool bergman_values =
      has_check(s, "thm8") || has_check(s, "thm9") || (has_check(s, "prop10") && symmetry(s.domain).is_bounded) ||
      any_expect([](const Expectation& e) {
        return e.quantity == "kernel" || e.quantity == "kernel_p2" || e.quantity == "metric_B";
      });
  return bergman_values &&
         std::any_of(s.points.begin(), s.points.end(), [&](const auto& z) { return !has_bergman_oracle(s.domain, z); });
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> checks{"prop1", "cor2",  "thm8",    "thm9",    "prop10",
                                               "eq16",  "eq19",  "lemma11", "exponent"};
  return checks;
}

const std::vector<std::string>& known_quantities() {
  static const std::vector<std::string> q{"gamma",          "kappa",          "gamma_d",
                                          "kappa_d",        "directional_distance", "boundary_distance",
                                          "p",              "kernel",         "kernel_p2",
                                          "kernel_numeric", "kernel_numeric_p2",    "metric_B",
                                          "metric_numeric_B", "metric_numeric_M"};
  return q;
}

Scenario parse_scenario(const Json& config) {
  if (!config.is_object()) throw SchemaError("scenario: expected an object");
  Scenario s;
  s.source = config;
  s.name = require(config, "name", "scenario").get<std::string>();
  s.domain = domain_from_json(require(config, "domain", "scenario"));
  s.numerics = parse_numerics(config.contains("numerics") ? config.at("numerics") : Json());

  const auto& checks = require(config, "checks", "scenario");
  if (!checks.is_array()) throw SchemaError("checks: expected an array of names");
  for (const auto& c : checks) {
    if (!c.is_string()) throw SchemaError("checks: expected an array of names");
    const auto name = c.get<std::string>();
    if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end()) {
      throw SchemaError("checks: unknown check '" + name + "'");
    }
    s.checks.push_back(name);
  }
  if (config.contains("expect")) {
    if (!config.at("expect").is_array()) throw SchemaError("expect: expected an array of objects");
    for (const auto& e : config.at("expect")) {
      Expectation x;
      x.quantity = require(e, "quantity", "expect").get<std::string>();
      if (std::find(known_quantities().begin(), known_quantities().end(), x.quantity) == known_quantities().end()) {
        throw SchemaError("expect: unknown quantity '" + x.quantity + "'");
      }
      x.value = require(e, "value", "expect").get<double>();
      x.tolerance = require(e, "tolerance", "expect").get<double>();
      if (!(x.tolerance >= 0.0)) throw SchemaError("expect: tolerance must be non-negative");
      x.relative = e.value("relative", false);
      if (e.contains("point")) x.point = e.at("point").get<std::size_t>();
      if (e.contains("vector")) x.vector = e.at("vector").get<std::size_t>();
      s.expectations.push_back(x);
    }
  }

  const bool only_exponent = s.checks.size() == 1 && s.checks.front() == "exponent" && s.expectations.empty();
  if (config.contains("points")) {
    s.points = parse_points(config.at("points"), s.domain, s.numerics.seed);
  } else if (!only_exponent) {
    throw SchemaError("scenario: missing key 'points'");
  }
  if (config.contains("vectors")) s.vectors = parse_vectors(config.at("vectors"), s.domain.dim(), s.numerics.seed);

  const bool needs_vectors =
      has_check(s, "prop1") || has_check(s, "cor2") || has_check(s, "thm8") || has_check(s, "prop10") ||
      has_check(s, "eq16") || has_check(s, "eq19") ||
      std::any_of(s.expectations.begin(), s.expectations.end(), [](const auto& e) { return vector_quantity(e.quantity); });
  if (needs_vectors && s.vectors.empty()) throw SchemaError("scenario: the requested checks need 'vectors'");
  for (const auto& e : s.expectations) {
    if (e.point && *e.point >= s.points.size()) throw SchemaError("expect: point index out of range");
    if (e.vector && *e.vector >= s.vectors.size()) throw SchemaError("expect: vector index out of range");
  }

  // Preconditions of the requested checks.
  const auto info = symmetry(s.domain);
  if (s.domain.dim() > 8) throw SchemaError("scenario: dimension above 8 is not supported");
  if (has_check(s, "cor2") && !has_gamma_kappa_oracle(s.domain)) {
    throw SchemaError("cor2: no Caratheodory/Kobayashi oracle for this domain");
  }
  const bool numeric = needs_gram(s);
  if (numeric && !info.is_bounded) {
    throw SchemaError("scenario: numerical Bergman values need a bounded domain");
  }
  if (numeric && s.numerics.mode == GramMode::moment_exact && !has_reinhardt_moments(s.domain)) {
    throw SchemaError("numerics.mode: moment_exact needs a Reinhardt model; use monte_carlo");
  }

  if (has_check(s, "exponent")) {
    const auto* e = s.domain.get_if<ComplexEllipsoid>();
    if (e == nullptr || e->exponents.size() != 2 || e->exponents[0] != 1) {
      throw SchemaError("exponent: domain must be complex_ellipsoid with exponents [1, m]");
    }
    ExponentSpec spec;
    spec.m = e->exponents[1];
    const auto& block = require(config, "exponent", "scenario");
    for (const auto& d : require(block, "deltas", "exponent")) {
      const double delta = d.get<double>();
      if (!(delta > 0.0 && delta <= 0.1)) throw SchemaError("exponent: delta outside (0, 0.1]");
      spec.deltas.push_back(delta);
    }
    s.exponent = spec;
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario file " + path.string());
  Json config;
  try {
    config = Json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::exception& e) {
    throw SchemaError("scenario " + path.string() + ": " + e.what());
  }
  return parse_scenario(config);
}

bool Report::pass() const {
  return !error && std::all_of(records.begin(), records.end(), [](const auto& r) { return r.pass; });
}

ExitCode Report::exit_code() const {
  if (error) return ExitCode::numerical_failure;
  return pass() ? ExitCode::pass : ExitCode::check_failed;
}

namespace {

struct PointContext {
  const Scenario& scenario;
  const GramModel* gram;
  const PaperConstants& constants;
  std::size_t point_index;
  const ComplexVector& z;
  std::vector<CheckRecord> records;

  std::optional<MinimalBasisFrame> frame_;
  std::optional<BergmanEstimate> numeric_kernel_;

  const Tolerances& tol() const { return scenario.numerics.tolerances; }

  double stochastic(double value, double error) const {
    return std::max(tol().sigmas * error, tol().relative * std::abs(value));
  }

  const MinimalBasisFrame& frame() {
    if (!frame_) frame_ = minimal_basis(scenario.domain, z);
    return *frame_;
  }

  const BergmanEstimate& numeric_kernel() {
    if (!numeric_kernel_) numeric_kernel_ = kernel_at(*gram, z);
    return *numeric_kernel_;
  }

  // A Bergman value with its tolerance in value units: the oracle when one
  // exists, the numerical engine otherwise.
  struct Sourced {
    double value;
    double tolerance;
    std::optional<double> error;
  };

  Sourced kernel() {
    if (has_bergman_oracle(scenario.domain, z)) return {bergman_oracle(scenario.domain, z).value, tol().closed_form, {}};
    const auto& k = numeric_kernel();
    return {k.K, stochastic(k.K, k.K_error), k.K_error};
  }

  Sourced metric(const ComplexVector& x) {
    if (has_bergman_oracle(scenario.domain, z)) {
      return {bergman_metric_oracle(scenario.domain, z, x).value, tol().closed_form, {}};
    }
    const auto b = metric_at(*gram, z, x);
    return {b.B, stochastic(b.B, b.B_error), b.B_error};
  }

  static std::optional<double> scaled(std::optional<double> e, double factor) {
    if (e) return *e * factor;
    return std::nullopt;
  }

  CheckRecord& add(const std::string& check, std::optional<std::size_t> vector_index, const ComplexVector* x,
                   double lower, double value, double upper, double tolerance, std::string note = {}) {
    CheckRecord r;
    r.check = check;
    r.point_index = point_index;
    r.vector_index = vector_index;
    r.z = z;
    if (x) r.x = *x;
    r.lower = lower;
    r.value = value;
    r.upper = upper;
    r.tolerance = tolerance;
    r.note = std::move(note);
    settle(r);
    records.push_back(std::move(r));
    return records.back();
  }

  void run_point_checks() {
    const Domain& domain = scenario.domain;
    if (has_check(scenario, "thm9")) {
      const auto k = kernel();
      const double p2 = frame().p * frame().p;
      add("thm9", std::nullopt, nullptr, constants.kernel_lower, k.value * p2, constants.kernel_upper,
          k.tolerance * p2, "K*p^2")
          .error_bar = scaled(k.error, p2);
    }
    if (has_check(scenario, "lemma11")) {
      const auto& f = frame();
      RealVector radii(domain.dim());
      for (Eigen::Index j = 0; j < domain.dim(); ++j) {
        radii(j) = directional_distance(domain, z, f.basis.col(j)).value;
      }
      if (!radii.allFinite()) throw PreconditionError("lemma11: infinite directional distance");
      const std::uint64_t seed = scenario.numerics.seed ^ (0x9e3779b97f4a7c15ULL * (point_index + 1));
      const auto result = diamond_inclusion_check(domain, z, radii, f.basis, scenario.numerics.inclusion_samples, seed);
      std::string note = "samples=" + std::to_string(result.samples_checked);
      if (result.witness) note += " witness_outside";
      add("lemma11", std::nullopt, nullptr, 1.0, result.contained ? 1.0 : 0.0, kInf, 0.0, note);
    }
  }

  void run_vector_checks(std::size_t vi, const ComplexVector& x) {
    const Domain& domain = scenario.domain;
    const double cf = tol().closed_form;
    const double d = directional_distance(domain, z, x).value;
    const bool oracle = has_gamma_kappa_oracle(domain);
    std::optional<InvariantMetricPair> gk;
    if (oracle) gk = gamma_kappa_oracle(domain, z, x);

    if (has_check(scenario, "prop1")) {
      if (!std::isfinite(d)) throw PreconditionError("prop1: infinite directional distance");
      const auto b = prop1_bounds(domain, z, x);
      if (gk) {
        add("prop1", vi, &x, 0.25, gk->gamma.value * d, kInf, cf, "gamma*d");
        add("prop1", vi, &x, -kInf, gk->kappa.value * d, 1.0, cf, "kappa*d");
      } else {
        add("prop1", vi, &x, 0.0, b.gamma.upper - b.gamma.lower, kInf, 0.0, "interval_width");
      }
    }
    if (has_check(scenario, "cor2")) {
      add("cor2", vi, &x, -kInf, gk->kappa.value / gk->gamma.value, 4.0, cf, "kappa/gamma");
    }
    if (has_check(scenario, "thm8")) {
      const auto bounds = thm8_bound(domain, z, x, frame());
      const auto b = metric(x);
      add("thm8", vi, &x, 0.25, b.value * d, constants.c_n, b.tolerance * d, "B*d").error_bar = scaled(b.error, d);
      add("thm8", vi, &x, bounds.bound.lower, b.value, bounds.refined_upper, b.tolerance,
          "B refined k=" + std::to_string(bounds.refined_index + 1))
          .error_bar = b.error;
    }
    if (has_check(scenario, "prop10")) {
      const double s = comparison_sum(x, frame());
      const double lo = 1.0 / (16.0 * constants.c_n), hi = constants.c_n;
      if (gk) {
        add("prop10", vi, &x, lo, gk->gamma.value / s, hi, cf, "caratheodory");
        add("prop10", vi, &x, lo, gk->kappa.value / s, hi, cf, "kobayashi");
      }
      if (symmetry(domain).is_bounded) {
        const auto b = metric(x);
        add("prop10", vi, &x, lo, b.value / s, hi, b.tolerance / s, "bergman_metric").error_bar = scaled(b.error, 1.0 / s);
      }
    }
    if (has_check(scenario, "eq16") || has_check(scenario, "eq19")) {
      const double sd = comparison_sum(x, frame()) * d;
      if (has_check(scenario, "eq16")) add("eq16", vi, &x, 1.0, sd, kInf, cf, "S*d");
      if (has_check(scenario, "eq19")) add("eq19", vi, &x, -kInf, sd, 4.0 * constants.c_n, cf, "S*d");
    }
  }

  double quantity(const std::string& q, const ComplexVector* x) {
    const Domain& domain = scenario.domain;
    if (q == "gamma" || q == "gamma_d") {
      const double g = gamma_kappa_oracle(domain, z, *x).gamma.value;
      return q == "gamma" ? g : g * directional_distance(domain, z, *x).value;
    }
    if (q == "kappa" || q == "kappa_d") {
      const double k = gamma_kappa_oracle(domain, z, *x).kappa.value;
      return q == "kappa" ? k : k * directional_distance(domain, z, *x).value;
    }
    if (q == "directional_distance") return directional_distance(domain, z, *x).value;
    if (q == "boundary_distance") return boundary_distance(domain, z).distance;
    if (q == "p") return frame().p;
    if (q == "kernel") return kernel().value;
    if (q == "kernel_p2") return kernel().value * frame().p * frame().p;
    if (q == "kernel_numeric") return numeric_kernel().K;
    if (q == "kernel_numeric_p2") return numeric_kernel().K * frame().p * frame().p;
    if (q == "metric_B") return metric(*x).value;
    if (q == "metric_numeric_B") return metric_at(*gram, z, *x).B;
    if (q == "metric_numeric_M") return metric_at(*gram, z, *x).M;
    throw SchemaError("expect: unknown quantity '" + q + "'");
  }

  void run_expectations() {
    for (const auto& e : scenario.expectations) {
      if (e.point && *e.point != point_index) continue;
      const double tolerance = e.relative ? e.tolerance * std::abs(e.value) : e.tolerance;
      if (vector_quantity(e.quantity)) {
        for (std::size_t vi = 0; vi < scenario.vectors.size(); ++vi) {
          if (e.vector && *e.vector != vi) continue;
          const auto& x = scenario.vectors[vi];
          add("expect", vi, &x, e.value, quantity(e.quantity, &x), e.value, tolerance, e.quantity);
        }
      } else {
        add("expect", std::nullopt, nullptr, e.value, quantity(e.quantity, nullptr), e.value, tolerance, e.quantity);
      }
    }
  }
};

}  // namespace

Report run_scenario(const Scenario& scenario, const RunOptions& options) {
  Report report;
  report.scenario = scenario.name;
  report.domain = domain_to_json(scenario.domain);
  report.domain_hash = domain_hash_hex(scenario.domain);
  report.numerics = scenario.numerics;
  report.degree = scenario.numerics.degree < 0 ? default_degree(scenario.domain.dim()) : scenario.numerics.degree;

  const auto constants = paper_constants(static_cast<int>(scenario.domain.dim()));
  std::optional<GramModel> gram;
  try {
    if (needs_gram(scenario)) {
      GramOptions g;
      g.degree = report.degree;
      g.mode = scenario.numerics.mode;
      g.samples = scenario.numerics.samples;
      g.seed = scenario.numerics.seed;
      g.threads = options.threads;
      gram = build_gram_cached(scenario.domain, g);
    }
  } catch (const std::exception& e) {
    report.error = std::string("gram: ") + e.what();
    return report;
  }

  const std::size_t count = scenario.points.size();
  std::vector<std::vector<CheckRecord>> per_point(count);
  std::vector<std::optional<std::string>> errors(count);
  parallel_for(count, options.threads, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    PointContext ctx{scenario, gram ? &*gram : nullptr, constants, i, scenario.points[i], {}, {}, {}};
    try {
      ctx.run_point_checks();
      for (std::size_t vi = 0; vi < scenario.vectors.size(); ++vi) ctx.run_vector_checks(vi, scenario.vectors[vi]);
      ctx.run_expectations();
    } catch (const std::exception& e) {
      errors[i] = "point " + std::to_string(i) + ": " + e.what();
    }
    if (options.timing) {
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      for (auto& r : ctx.records) r.wall_seconds = seconds;
    }
    per_point[i] = std::move(ctx.records);
  });

  for (std::size_t i = 0; i < count; ++i) {
    for (auto& r : per_point[i]) report.records.push_back(std::move(r));
    if (errors[i] && !report.error) report.error = errors[i];
  }

  if (scenario.exponent && !report.error) {
    try {
      const auto start = std::chrono::steady_clock::now();
      const auto fit = exponent_experiment(scenario.exponent->m, scenario.exponent->deltas);
      CheckRecord r;
      r.check = "exponent";
      r.z = ComplexVector::Zero(2);
      r.z(0) = 1.0;
      r.lower = 0.95 * fit.expected_slope;
      r.value = fit.slope;
      r.upper = 1.05 * fit.expected_slope;
      r.note = "m=" + std::to_string(fit.m) + " fitted_points=" +
               std::to_string(std::count_if(fit.samples.begin(), fit.samples.end(), [](const auto& s) { return s.fitted; }));
      if (options.timing) r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      settle(r);
      report.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      report.error = std::string("exponent: ") + e.what();
    }
  }

  for (std::size_t i = 0; i < report.records.size(); ++i) {
    report.records[i].index = i;
    report.records[i].domain_hash = report.domain_hash;
  }
  return report;
}

}  // namespace cconvex
