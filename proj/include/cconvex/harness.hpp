#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cconvex/bergman.hpp"
#include "cconvex/check_record.hpp"
#include "cconvex/domain_io.hpp"

namespace cconvex {

inline constexpr int kReportSchemaVersion = 1;

using OrderedJson = nlohmann::ordered_json;

enum class ExitCode : int { pass = 0, check_failed = 1, config_error = 2, numerical_failure = 3 };

struct Tolerances {
  double closed_form = 1e-9;
  double sigmas = 3.0;     // stochastic checks: this many standard errors ...
  double relative = 0.03;  // ... or this fraction of the value, whichever is larger
};

struct Numerics {
  int degree = -1;  // negative: default for the dimension
  GramMode mode = GramMode::moment_exact;
  std::size_t samples = kDefaultBergmanSamples;
  std::uint64_t seed = 1;
  std::size_t inclusion_samples = 100'000;
  Tolerances tolerances;
};

/// Explicit target for one quantity at selected inputs.
struct Expectation {
  std::string quantity;
  double value = 0.0;
  double tolerance = 0.0;
  bool relative = false;
  std::optional<std::size_t> point;   // all points when absent
  std::optional<std::size_t> vector;  // all vectors when absent
};

struct ExponentSpec {
  int m = 1;
  std::vector<double> deltas;
};

struct Scenario {
  std::string name;
  Domain domain = Domain::unit_disc();
  std::vector<ComplexVector> points;
  std::vector<ComplexVector> vectors;
  std::vector<std::string> checks;
  std::vector<Expectation> expectations;
  std::optional<ExponentSpec> exponent;
  Numerics numerics;
  Json source;  // the configuration as parsed
};

/// Names accepted in "checks".
const std::vector<std::string>& known_checks();
/// Names accepted in "expect[].quantity".
const std::vector<std::string>& known_quantities();

/// Parses and validates a scenario; throws SchemaError (or another
/// std::invalid_argument) on any schema or precondition violation.
Scenario parse_scenario(const Json& config);
Scenario load_scenario(const std::filesystem::path& path);

struct RunOptions {
  unsigned threads = 1;
  bool timing = false;  // record wall time per check (breaks byte determinism)
};

struct Report {
  std::string scenario;
  Json domain;
  std::string domain_hash;
  int degree = 0;  // resolved polynomial degree
  Numerics numerics;
  std::vector<CheckRecord> records;
  std::optional<std::string> error;  // set when a numerical failure stopped the run

  bool pass() const;
  ExitCode exit_code() const;
};

Report run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// JSON text with every number written to 17 significant digits and
/// infinities as the strings "inf" / "-inf".
std::string report_json(const Report& report);
std::string report_csv(const Report& report);

/// Writes <prefix>.json and <prefix>.csv.
void report_emit(const Report& report, const std::filesystem::path& prefix);

/// Serializes any JSON value with the report number format.
std::string dump_json(const OrderedJson& value, int indent = 2);

}  // namespace cconvex
