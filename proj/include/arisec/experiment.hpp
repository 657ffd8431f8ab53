// Copyright 2026 The arisec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "arisec/bcd.hpp"
#include "arisec/config.hpp"

namespace arisec {

/// Version tag written into every results file. Bump when columns change.
inline constexpr const char* kResultsSchema = "arisec.results/1";

struct SweepAxis {
  std::string key;  // a scenario key, see supported_axes()
  std::vector<double> values;
};

/// One batch of Monte Carlo runs over a cartesian grid of scenario parameters.
struct ExperimentSpec {
  std::string name = "experiment";
  ScenarioConfig scenario = ScenarioConfig::desk_defaults();
  std::vector<SweepAxis> axes;  // empty means a single point
  int trials = 20;
  std::uint64_t seed = 1;       // trial t uses seed + t
  std::vector<Scheme> schemes = {Scheme::proposed, Scheme::fixed_deployment, Scheme::without_ris};
};

/// Scenario keys that may be swept.
const std::vector<std::string>& supported_axes();

/// Parses `key = value` spec text. Keys: name, scenario (desk | full | path relative to
/// base_dir), set.<scenario key>, axis.<scenario key> (comma list), trials, seed, schemes.
ExperimentSpec parse_experiment(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Throws Error(invalid_config) when the grid is empty, trials < 1, or any point is invalid.
void validate(const ExperimentSpec& spec);

/// Desk-scale presets mirroring the axes of figures 3 to 7.
ExperimentSpec figure_spec(int figure);

std::size_t grid_size(const ExperimentSpec& spec);
/// Axis values of grid point p (first axis varies slowest).
std::vector<double> grid_point(const ExperimentSpec& spec, std::size_t p);
ScenarioConfig point_config(const ExperimentSpec& spec, std::size_t p);

struct ResultRow {
  std::size_t point = 0;
  std::vector<double> axis_values;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::proposed;
  std::string status = "ok";  // "ok" or "error: <message>"
  double objective = 0.0;
  double sum_rate = 0.0;
  std::vector<double> group_rates;
  double max_eaves_rate = 0.0;
  double wiretap_residual = 0.0;
  double power_residual = 0.0;
  bool feasible = false;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  int audit_violations = 0;
  double worst_drop = 0.0;
  int rounding_rejected = 0;
  std::uint64_t channel_hash = 0;
  double seconds = 0.0;  // only written to the timing sidecar
};

struct ResultsTable {
  std::string schema = kResultsSchema;
  std::vector<std::string> axis_names;
  std::vector<ResultRow> rows;  // ordered by (point, seed, scheme)
};

struct RunOptions {
  int workers = 1;
  /// Called after each finished (point, seed) with the number done and the total.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Every (point, seed) samples one realization and runs each scheme on it.
/// Failed trials become rows with an error status; the run continues.
ResultsTable run_experiment(const ExperimentSpec& spec, const RunOptions& options = {});

/// Full-precision, byte-stable encodings.
std::string to_csv(const ResultsTable& table);
std::string to_json(const ResultsTable& table);
ResultsTable from_json(std::string_view text);
std::string timing_csv(const ResultsTable& table);

/// Writes <stem>.csv and <stem>.json into `dir` (created if needed), plus
/// <stem>.timing.csv when `timing` is set. Returns the paths written.
std::vector<std::filesystem::path> write_results(const ResultsTable& table, const std::filesystem::path& dir,
                                                 const std::string& stem, bool timing);

/// Mean objective per (point, scheme) over rows with status "ok".
struct PointSummary {
  std::size_t point = 0;
  std::vector<double> axis_values;
  Scheme scheme = Scheme::proposed;
  double mean_objective = 0.0;
  int runs = 0;
};
std::vector<PointSummary> summarize(const ResultsTable& table);

}  // namespace arisec
