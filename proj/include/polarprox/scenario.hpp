#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "polarprox/diagnostics.hpp"
#include "polarprox/solver.hpp"

namespace polarprox::cli {

/// Envelope-grid request over the (x, lambda) plane; only valid when the base
/// space is one-dimensional.
struct GridSpec {
  double x_min = -2.0, x_max = 2.0;
  double lambda_min = -2.0, lambda_max = 2.0;
  int resolution = 101;
  std::string path = "grid.csv";
};

/// Parsed, validated scenario: gauge, solver parameters, requested audits and
/// output paths. Built from the JSON config schema described in the README.
struct ScenarioConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double gamma = 0.0;
  std::vector<double> gamma_sweep;  // when nonempty, overrides gamma
  LiftedPoint start;
  SolverConfig solver;
  std::vector<std::string> audits;
  int fqne_probe_budget = 1000;
  double fqne_box_halfwidth = 3.0;
  std::optional<LiftedPoint> reference_fixed_point;
  std::string trace_path = "trace.csv";
  std::string summary_path = "summary.json";
  std::optional<GridSpec> grid;

  GaugePtr gauge;
  std::optional<ConvexFunctionSpec> function;  // set for perspective gauges
};

struct BuiltinInfo {
  std::string name;
  std::string description;
};

const std::vector<BuiltinInfo>& list_builtin_scenarios();

/// Throws ConfigError (field-qualified message) on invalid input.
ScenarioConfig parse_scenario_json(const std::string& text);

/// Parse just a gauge spec (the "gauge" object of the config schema).
GaugePtr parse_gauge_json(const std::string& text,
                          std::optional<ConvexFunctionSpec>* function_out = nullptr);

/// Parse just a function spec (the "function" object of the config schema).
ConvexFunctionSpec parse_function_json(const std::string& text);
ScenarioConfig load_scenario_file(const std::filesystem::path& path);
ScenarioConfig load_builtin_scenario(const std::string& name);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;
};

/// Execute the scenario: solver run(s), audits, trace CSV + summary JSON.
/// Returns the exit code contract: 0 converged with all audits holding,
/// 1 on a violated audit or a non-converged run, 2 on an oracle error.
int run_scenario(const ScenarioConfig& config, const RunOptions& options);

/// Run every builtin concurrently, each in its own subdirectory of out_dir.
/// Returns the maximum of the individual exit codes.
int run_all_builtins(const RunOptions& options);

/// Write the envelope-surface CSV (x, lambda, envelope, case, prox coords).
void emit_envelope_grid(const ScenarioConfig& config,
                        const std::filesystem::path& out_path);

/// 17-significant-digit text form used in every CSV so reruns are
/// byte-identical.
std::string format_double(double v);

}  // namespace polarprox::cli
