#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tvopt/flow.hpp"
#include "tvopt/oracle.hpp"
#include "tvopt/scenario.hpp"
#include "tvopt/schedule.hpp"

namespace tvopt {

enum class ScenarioKind { kSwitching, kTwoAgent };

// Everything needed to reproduce one run. Identical configs (seed
// included) produce bitwise-identical CSV output.
struct RunConfig {
  ScenarioKind scenario = ScenarioKind::kSwitching;
  std::uint64_t seed = 1;

  // scenario shape
  std::size_t waypoint_count = 5;  // interior waypoints per target
  std::size_t basis_size = 30;     // polynomial coefficients per component
  double switch_time = 0.5;
  double switch_rate = 20.0;
  double radius = 0.05;

  // dynamics
  std::optional<double> sigma;   // defaults per scenario: 10 / 50
  std::optional<Matrix> gain;    // explicit gain overrides sigma * I
  ScheduleParams schedule;       // s0 ignored when auto_slack is set
  bool auto_slack = true;
  std::optional<double> slack_epsilon;
  std::optional<Vec> start;      // default: origin
  double t_end = 1.0;
  IntegratorOptions integrator;

  // measurement
  double oracle_tol = 1e-8;
  std::string output_path;  // empty: no CSV written
};

struct TraceRecord {
  double t = 0.0;
  Vec x;
  Vec x_star;
  Vec lambda_star;        // empty for unconstrained runs
  Vec x_tilde;            // slack-relaxed optimum (constrained runs)
  Vec z_tilde;            // barrier minimizer (constrained runs)
  double error = 0.0;     // |x - x_star|
  double grad_norm = 0.0; // objective gradient norm, or barrier gradient norm
  Vec constraint_values;
  BoundReport bounds;
  std::size_t steps = 0;
  std::size_t rejects = 0;
};

struct RunTrace {
  std::size_t dimension = 0;
  std::size_t constraint_count = 0;
  double sigma = 0.0;
  double t_end = 0.0;
  std::vector<TraceRecord> records;
  FlowState final_state;
  std::size_t regularization_count = 0;
};

// Builds the scenario, integrates the matching flow, and solves the
// frozen-time references at every sample. Oracle solves happen at sample
// times only and are warm-started along the trace.
RunTrace run_scenario(const RunConfig& config);

struct DecayFit {
  double rate = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope of log(value) against t, negated. Requires at least
// ten samples; throws NonPositiveValue when a value is not positive.
DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& samples);

// CSV with one row per sample; numbers carry 17 significant digits so a
// round-trip parse reproduces the trace bitwise. LF line endings.
std::string format_csv(const RunTrace& trace);
void emit_csv(const RunTrace& trace, const std::string& path);

struct RunSummary {
  std::string text;
  bool pass = false;  // every sampled bound check satisfied
  double final_error = 0.0;
  double fitted_rate = 0.0;
  double fit_r_squared = 0.0;
  double max_bound_violation = 0.0;
  std::size_t steps = 0;
  std::size_t rejects = 0;
};

// Condenses a trace: final error, fitted gradient decay rate (over the
// window t in [0.05, 0.45] * t_end), worst bound violation, step counts.
RunSummary summarize(const RunTrace& trace);

// Prints the summary to stdout; the result's pass flag is the process
// exit criterion (0 when every bound check passed).
bool emit_summary(const RunTrace& trace);

// Flat key=value configuration file (one entry per line, '#' comments).
RunConfig parse_config_file(const std::string& path);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace tvopt
