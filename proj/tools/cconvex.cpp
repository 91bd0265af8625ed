// Command-line driver: scenario runner and one-shot queries.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cconvex/bergman.hpp"
#include "cconvex/bounds.hpp"
#include "cconvex/harness.hpp"
#include "cconvex/reference_metrics.hpp"

using namespace cconvex;

namespace {

// Accepts inline JSON or a path to a JSON file (comments allowed).
Json read_json_argument(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    return Json::parse(text, nullptr, true, true);
  }
  std::ifstream in(text);
  if (!in) throw SchemaError("cannot open " + text);
  return Json::parse(in, nullptr, true, true);
}

OrderedJson vec(const ComplexVector& v) {
  OrderedJson a = OrderedJson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(OrderedJson::array({v(i).real(), v(i).imag()}));
  return a;
}

void emit(const OrderedJson& j, const std::string& out) {
  const std::string text = dump_json(j) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text)) throw std::runtime_error("cannot write " + out);
}

struct Query {
  std::string domain;
  std::string point;
  std::string direction;
  std::string out;
};

struct Parsed {
  Domain domain = Domain::unit_disc();
  ComplexVector z;
  std::optional<ComplexVector> x;
};

Parsed parse_query(const Query& q, bool need_direction) {
  Parsed p;
  p.domain = domain_from_json(read_json_argument(q.domain));
  p.z = vector_from_json(Json::parse(q.point));
  if (!q.direction.empty()) p.x = vector_from_json(Json::parse(q.direction));
  if (need_direction && !p.x) throw SchemaError("--direction is required");
  return p;
}

OrderedJson frame_json(const MinimalBasisFrame& f) {
  OrderedJson j;
  j["distances"] = OrderedJson::array();
  for (Eigen::Index k = 0; k < f.distances.size(); ++k) j["distances"].push_back(f.distances(k));
  j["p"] = f.p;
  j["basis"] = OrderedJson::array();
  for (Eigen::Index k = 0; k < f.basis.cols(); ++k) j["basis"].push_back(vec(f.basis.col(k)));
  j["contacts"] = OrderedJson::array();
  for (const auto& c : f.contacts) j["contacts"].push_back(vec(c));
  return j;
}

std::vector<double> parse_deltas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry, invariant metrics and Bergman kernels on C-convex model domains"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  unsigned threads = 1;
  int degree = -1;
  std::size_t samples = kDefaultBergmanSamples;
  std::string mode = "moment_exact";
  bool seed_set = false, degree_set = false, samples_set = false;

  auto* verify = app.add_subcommand("verify", "Run a scenario file and write <out>.json and <out>.csv");
  std::string scenario_path, out_prefix;
  bool timing = false;
  verify->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  verify->add_option("--out", out_prefix, "Report path prefix (default: the scenario name)");
  verify->add_option("--seed", seed, "Override numerics.seed")->each([&](const std::string&) { seed_set = true; });
  verify->add_option("--threads", threads, "Worker threads (results do not depend on it)")->default_val(1);
  verify->add_option("--degree", degree, "Override numerics.degree")->each([&](const std::string&) { degree_set = true; });
  verify->add_option("--samples", samples, "Override numerics.samples")->each([&](const std::string&) { samples_set = true; });
  verify->add_flag("--timing", timing, "Record wall time per check (reports are then not byte-reproducible)");

  Query q;
  auto add_query = [&](CLI::App* sub, bool direction_required) {
    sub->add_option("--domain", q.domain, "Domain JSON (inline or file)")->required();
    sub->add_option("--point", q.point, "Point as JSON, e.g. [[0.3,0],0]")->required();
    auto* d = sub->add_option("--direction", q.direction, "Direction as JSON");
    if (direction_required) d->required();
    sub->add_option("--out", q.out, "Write the JSON answer to this file");
  };
  auto* distance = app.add_subcommand("distance", "Boundary and directional distances");
  add_query(distance, false);
  auto* basis = app.add_subcommand("basis", "Minimal-basis frame at a point");
  add_query(basis, false);
  auto* kernel = app.add_subcommand("kernel", "Numerical Bergman kernel (and metric with --direction)");
  add_query(kernel, false);
  kernel->add_option("--degree", degree, "Polynomial degree (default depends on dimension)");
  kernel->add_option("--mode", mode, "moment_exact or monte_carlo")->default_val("moment_exact");
  kernel->add_option("--samples", samples, "Monte Carlo samples")->default_val(kDefaultBergmanSamples);
  kernel->add_option("--seed", seed, "Monte Carlo seed")->default_val(1);
  kernel->add_option("--threads", threads, "Worker threads")->default_val(1);
  auto* bounds = app.add_subcommand("bounds", "All explicit bounds at (z, X)");
  add_query(bounds, true);

  auto* exponent = app.add_subcommand("exponent", "Boundary exponent fit on {|z1|^2 + |z2|^2m < 1}");
  int m = 2;
  std::string deltas = "1e-6,1e-5,1e-4,1e-3,1e-2";
  exponent->add_option("--m", m, "Exponent m")->default_val(2);
  exponent->add_option("--deltas", deltas, "Comma-separated deltas in (0, 0.1]");
  exponent->add_option("--out", q.out, "Write the JSON answer to this file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      Json config = read_json_argument(scenario_path);
      if (seed_set) config["numerics"]["seed"] = seed;
      if (degree_set) config["numerics"]["degree"] = degree;
      if (samples_set) config["numerics"]["samples"] = samples;
      const Scenario scenario = parse_scenario(config);
      const Report report = run_scenario(scenario, {threads, timing});
      report_emit(report, out_prefix.empty() ? scenario.name : out_prefix);
      const auto failed = std::count_if(report.records.begin(), report.records.end(), [](const auto& r) { return !r.pass; });
      std::cout << scenario.name << ": " << report.records.size() << " checks, " << failed << " failed"
                << (report.error ? ", error: " + *report.error : "") << "\n";
      return static_cast<int>(report.exit_code());
    }
    if (distance->parsed()) {
      const auto p = parse_query(q, false);
      OrderedJson j;
      const auto b = boundary_distance(p.domain, p.z);
      j["boundary_distance"] = b.distance;
      j["nearest_point"] = vec(b.point);
      if (p.x) {
        const auto d = directional_distance(p.domain, p.z, *p.x);
        j["directional_distance"] = d.value;
        j["contact_lambda"] = OrderedJson::array({d.contact.real(), d.contact.imag()});
      }
      emit(j, q.out);
      return 0;
    }
    if (basis->parsed()) {
      const auto p = parse_query(q, false);
      emit(frame_json(minimal_basis(p.domain, p.z)), q.out);
      return 0;
    }
    if (kernel->parsed()) {
      const auto p = parse_query(q, false);
      GramOptions g;
      g.degree = degree;
      g.mode = gram_mode_from_string(mode);
      g.samples = samples;
      g.seed = seed;
      g.threads = threads;
      const auto model = build_gram_cached(p.domain, g);
      const auto est = p.x ? metric_at(model, p.z, *p.x) : kernel_at(model, p.z);
      OrderedJson j;
      j["degree"] = est.degree;
      j["mode"] = to_string(est.mode);
      j["K"] = est.K;
      j["K_error"] = est.K_error;
      if (p.x) {
        j["M"] = est.M;
        j["M_error"] = est.M_error;
        j["B"] = est.B;
        j["B_error"] = est.B_error;
      }
      j["jitter"] = est.jitter;
      j["min_eigenvalue"] = model.min_eigenvalue;
      if (has_bergman_oracle(p.domain, p.z)) j["K_closed_form"] = bergman_oracle(p.domain, p.z).value;
      emit(j, q.out);
      return 0;
    }
    if (bounds->parsed()) {
      const auto p = parse_query(q, true);
      const auto c = paper_constants(static_cast<int>(p.domain.dim()));
      const auto frame = minimal_basis(p.domain, p.z);
      const auto p1 = prop1_bounds(p.domain, p.z, *p.x);
      const auto t8 = thm8_bound(p.domain, p.z, *p.x, frame);
      const auto cmp = comparison_bounds(p.domain, p.z, *p.x, frame);
      OrderedJson j;
      j["constants"] = {{"n", c.n}, {"C_n", c.C_n}, {"c_prime_n", c.c_prime_n}, {"c_n", c.c_n},
                        {"kernel_lower", c.kernel_lower}, {"kernel_upper", c.kernel_upper}};
      j["directional_distance"] = p1.d;
      j["gamma_kappa_interval"] = OrderedJson::array({p1.gamma.lower, p1.gamma.upper});
      j["bergman_metric_interval"] = OrderedJson::array({t8.bound.lower, t8.refined_upper});
      j["bergman_metric_coarse_upper"] = t8.coarse_upper;
      j["comparison_sum"] = *cmp.value;
      j["comparison_interval"] = OrderedJson::array({cmp.lower, cmp.upper});
      j["p"] = frame.p;
      j["kernel_times_p2_interval"] = OrderedJson::array({c.kernel_lower, c.kernel_upper});
      if (has_gamma_kappa_oracle(p.domain)) {
        const auto gk = gamma_kappa_oracle(p.domain, p.z, *p.x);
        j["gamma"] = gk.gamma.value;
        j["kappa"] = gk.kappa.value;
      }
      if (has_bergman_oracle(p.domain, p.z)) {
        j["K"] = bergman_oracle(p.domain, p.z).value;
        j["B"] = bergman_metric_oracle(p.domain, p.z, *p.x).value;
      }
      emit(j, q.out);
      return 0;
    }
    if (exponent->parsed()) {
      const auto fit = exponent_experiment(m, parse_deltas(deltas));
      OrderedJson j;
      j["m"] = fit.m;
      j["slope"] = fit.slope;
      j["expected_slope"] = fit.expected_slope;
      j["intercept"] = fit.intercept;
      j["samples"] = OrderedJson::array();
      for (const auto& s : fit.samples) {
        j["samples"].push_back({{"delta", s.delta},
                                {"boundary_distance", s.boundary_distance},
                                {"directional_distance", s.directional_distance},
                                {"metric_interval", OrderedJson::array({s.lower, s.upper})},
                                {"fitted", s.fitted}});
      }
      emit(j, q.out);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::numerical_failure);
  }
  return 0;
}
