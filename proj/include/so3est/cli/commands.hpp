#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "so3est/dynamics.hpp"
#include "so3est/errors.hpp"
#include "so3est/filters.hpp"
#include "so3est/sim.hpp"

namespace so3est::cli {

using nlohmann::json;

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kConfigError = 2,
  kGoldenMismatch = 3,
  kSingularProfile = 4,
  kReflectionProfile = 5,
  kNumericalError = 6,
};

int exit_code_for(ErrorCode code);

struct CommandOptions {
  std::string config;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<FilterMode> mode;
};

// paper-example -------------------------------------------------------------

struct PaperExampleResult {
  Matrix3d C_hat;
  Matrix3d S;
  Matrix3d error;      // C_hatᵀ C - I against the published true attitude
  Matrix3Xd residual;  // E - C_hat B
  double cost = 0.0;
  double max_deviation = 0.0;  // vs the published estimate
  double max_error = 0.0;      // max |e_C|
  double stationarity = 0.0;
  bool passed = false;
};

PaperExampleResult paper_example();
std::string format_report(const PaperExampleResult& r);
json to_json(const PaperExampleResult& r);

// determine -----------------------------------------------------------------

struct DetermineResult {
  Matrix3d C_hat;
  Matrix3d S;
  double cost = 0.0;
  double stationarity = 0.0;
  std::optional<double> principal_angle;
  std::optional<Matrix3d> error;
};

DetermineResult determine(const json& cfg);
json to_json(const DetermineResult& r);

// propagate -----------------------------------------------------------------

struct PropagateSample {
  BodyState<double> state;
  double kinetic_energy = 0.0;
};

std::vector<PropagateSample> run_propagate(const json& cfg);
std::string propagate_csv(const std::vector<PropagateSample>& samples);

// filter / montecarlo -------------------------------------------------------

struct FilterSetup {
  ScenarioSpec<double> scenario;
  FilterConfig<double> filter;
  FilterMode mode = FilterMode::NoGyro;
  json init_attitude = "bootstrap";
  json init_omega;  // null selects the mode default
};

FilterSetup parse_filter_setup(const json& cfg, const CommandOptions& opts = {});

struct FilterRow {
  double t = 0.0;
  double err_att_pre = 0.0;
  double err_att_post = 0.0;
  double err_omega_pre = 0.0;
  double err_omega_post = 0.0;
  double cost_J0 = 0.0;
};

inline constexpr const char* kFilterCsvHeader =
    "t,err_att_pre_rad,err_att_post_rad,err_omega_pre,err_omega_post,cost_J0";

/// Simulates one noise realization (stream `trial` of `seed`) and runs the filter on it.
std::vector<FilterRow> run_filter_trial(const FilterSetup& setup, std::uint64_t seed, std::uint64_t trial);
std::string filter_csv(const std::vector<FilterRow>& rows);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;
  double max = 0.0;
};

struct EpochStats {
  double t = 0.0;
  MetricStats att_pre, att_post, omega_pre, omega_post;
};

struct MonteCarloSummary {
  int trials = 0;
  std::uint64_t seed = 0;
  FilterMode mode = FilterMode::NoGyro;
  std::vector<EpochStats> epochs;
  EpochStats aggregate;  // over every (trial, epoch) pair; t unused
};

/// Runs `trials` independent realizations, in parallel when threads != 1 (0 = hardware).
/// The reduction runs in trial order, so the summary does not depend on the thread count.
MonteCarloSummary run_montecarlo(const FilterSetup& setup, int trials, std::uint64_t seed, unsigned threads = 0);
MonteCarloSummary summarize(const std::vector<std::vector<FilterRow>>& runs);
json to_json(const MonteCarloSummary& s);

// dispatch ------------------------------------------------------------------

int cmd_paper_example(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_determine(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_propagate(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_filter(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_montecarlo(const CommandOptions& opts, std::ostream& out, std::ostream& log);

/// Runs a subcommand by name, converting exceptions into an error message and exit code.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& log);

}  // namespace so3est::cli
