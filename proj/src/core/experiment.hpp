#ifndef SPHEREPROX_EXPERIMENT_HPP
#define SPHEREPROX_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/algorithms.hpp"
#include "core/convex_function.hpp"
#include "core/geometry.hpp"

namespace sphereprox {

inline constexpr int kConfigSchemaVersion = 1;

// Schedule <-> config JSON, shape {"family": ..., ...params}. "constant"
// takes "value", "harmonic" takes "exponent", "linear" takes nothing, and
// "custom" takes a "values" array plus an optional "claims" object whose
// boolean members mirror ScheduleClaims. Throws ConfigError on anything
// malformed.
Schedule schedule_from_json(ScheduleRole role, const nlohmann::json& j);
nlohmann::json schedule_to_json(const Schedule& s);

// One batch run, fully specified: where, what to minimize, which iteration,
// with which coefficients, and where the outputs go.
struct ExperimentConfig {
  int schema_version;
  double kappa;                   // 1 runs directly on the model space
  AdmissibleSpace space;          // the unit-curvature model
  ConvexFunction function;
  SchemeKind algorithm;
  std::optional<Schedule> alpha;  // absent exactly for ppa
  Schedule lambda;
  Point init;
  std::optional<Point> anchor;    // halpern only
  int n_max;
  double stop_tol;                // in curvature units when kappa != 1
  std::uint64_t seed;
  std::string trace_csv_path;
  std::string report_json_path;
};

// Parses and cross-validates a config document (schema version, point
// containment, schedule/algorithm agreement). Throws ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

// Reads and parses a config file; relative output paths are resolved
// against the file's directory. Throws IoError on filesystem trouble.
ExperimentConfig load_experiment_config(const std::string& path);

struct ExperimentOutcome {
  int exit_code;        // 0 clean; 1 the run stopped on a solver failure
  std::string message;  // failure text when exit_code != 0
  IterationTrace trace;
  nlohmann::json report;
};

// Runs the configured iteration, writes the trace CSV (header
// n,alpha_n,lambda_n,step_dist,f_x,f_z,dist_to_min,dist_to_Pv, one row per
// step, 17-significant-digit floats) and the report JSON (hypothesis
// checks, boundedness certificate, asymptotic center, averaged-cosine
// maximizer, inequality residual minima). A solver failure mid-run still
// writes both files for the completed prefix and returns exit_code 1;
// config or filesystem trouble throws instead.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// --- invariant check suites -----------------------------------------------

struct PropertyResult {
  std::string name;
  int samples = 0;
  double worst = 0.0;     // extremal measured value, read per `rule`
  double tolerance = 0.0;
  std::string rule;       // "min >= -tolerance" or "max <= tolerance"
  bool pass = false;
  std::string witness;    // first offending sample; empty when pass
};

struct SuiteResult {
  std::string suite;
  std::vector<PropertyResult> properties;
  bool pass = false;
};

struct CheckReport {
  std::string suite_selector;
  std::uint64_t seed = 0;
  int samples = 0;
  std::optional<double> tolerance_override;
  std::vector<SuiteResult> suites;
  bool pass = false;
};

inline constexpr int kDefaultCheckSamples = 1000;

// Runs the named property sweep ("geometry", "functions", "resolvent",
// "diagnostics", or "all") with sampling pinned by the seed. `samples`
// scales every per-property sample count; tolerance_override, when set,
// replaces each property's own tolerance. Throws ConfigError for an
// unknown suite name or nonpositive sample count.
CheckReport check_invariants(const std::string& suite, std::uint64_t seed = 1,
                             int samples = kDefaultCheckSamples,
                             std::optional<double> tolerance_override = {});

nlohmann::json check_report_to_json(const CheckReport& report);

}  // namespace sphereprox

#endif
