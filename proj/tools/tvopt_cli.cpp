// Command line front end: run a tracking scenario, validate scenario
// derivatives, or sweep dynamics parameters over a grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvopt/barrier.hpp"
#include "tvopt/errors.hpp"
#include "tvopt/harness.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitRuntimeError = 2;

struct CliOptions {
  std::string scenario = "switching";
  std::vector<double> sigma;
  std::vector<double> gamma_c;
  std::vector<double> alpha;
  double c0 = -1.0;
  std::string s0 = "";
  double epsilon = -1.0;
  double t_end = -1.0;
  double max_step = -1.0;
  double sample_interval = -1.0;
  long long seed = -1;
  long long degree = -1;
  long long waypoints = -1;
  double t_int = -1.0;
  double gamma_switch = -1.0;
  double radius = -1.0;
  double oracle_tol = -1.0;
  std::string out;
};

void add_common_options(CLI::App* app, CliOptions* options) {
  app->add_option("--scenario", options->scenario,
                  "switching | two-agent | path to a key=value config file");
  app->add_option("--sigma", options->sigma, "gain rate(s); scenario default when omitted")
      ->delimiter(',');
  app->add_option("--gamma-c", options->gamma_c, "barrier coefficient growth rate(s)")
      ->delimiter(',');
  app->add_option("--alpha", options->alpha, "slack decay rate(s)")->delimiter(',');
  app->add_option("--c0", options->c0, "initial barrier coefficient");
  app->add_option("--s0", options->s0, "initial slack: auto or a value");
  app->add_option("--epsilon", options->epsilon, "margin for the automatic initial slack");
  app->add_option("--t-end", options->t_end, "integration horizon");
  app->add_option("--max-step", options->max_step, "maximum integrator step");
  app->add_option("--sample-interval", options->sample_interval, "trace sampling interval");
  app->add_option("--seed", options->seed, "waypoint generator seed");
  app->add_option("--degree", options->degree, "polynomial coefficients per path component");
  app->add_option("--waypoints", options->waypoints, "interior waypoints per target");
  app->add_option("--t-int", options->t_int, "switch midpoint (switching scenario)");
  app->add_option("--gamma-switch", options->gamma_switch, "switch sharpness");
  app->add_option("--r", options->radius, "target proximity radius (two-agent scenario)");
  app->add_option("--oracle-tol", options->oracle_tol, "frozen-time solver tolerance");
  app->add_option("--out", options->out, "output CSV path");
}

tvopt::RunConfig build_config(const CliOptions& options) {
  tvopt::RunConfig config;
  if (options.scenario == "switching" || options.scenario == "two-agent")
    tvopt::apply_config_entry(config, "scenario", options.scenario);
  else
    config = tvopt::parse_config_file(options.scenario);

  if (!options.sigma.empty()) config.sigma = options.sigma.front();
  if (!options.gamma_c.empty()) config.schedule.gamma_c = options.gamma_c.front();
  if (!options.alpha.empty()) config.schedule.alpha = options.alpha.front();
  if (options.c0 >= 0.0) config.schedule.c0 = options.c0;
  if (!options.s0.empty()) tvopt::apply_config_entry(config, "s0", options.s0);
  if (options.epsilon >= 0.0) config.slack_epsilon = options.epsilon;
  if (options.t_end >= 0.0) config.t_end = options.t_end;
  if (options.max_step > 0.0) config.integrator.max_step = options.max_step;
  if (options.sample_interval > 0.0) config.integrator.sample_interval = options.sample_interval;
  if (options.seed >= 0) config.seed = static_cast<std::uint64_t>(options.seed);
  if (options.degree > 0) config.basis_size = static_cast<std::size_t>(options.degree);
  if (options.waypoints > 0) config.waypoint_count = static_cast<std::size_t>(options.waypoints);
  if (options.t_int >= 0.0) config.switch_time = options.t_int;
  if (options.gamma_switch > 0.0) config.switch_rate = options.gamma_switch;
  if (options.radius > 0.0) config.radius = options.radius;
  if (options.oracle_tol > 0.0) config.oracle_tol = options.oracle_tol;
  if (!options.out.empty()) config.output_path = options.out;
  return config;
}

int run_command(const CliOptions& options) {
  const tvopt::RunConfig config = build_config(options);
  const tvopt::RunTrace trace = tvopt::run_scenario(config);
  return tvopt::emit_summary(trace) ? kExitPass : kExitCheckFailed;
}

int validate_command(const CliOptions& options) {
  const tvopt::RunConfig config = build_config(options);

  const auto first = tvopt::fit_min_acceleration_path(
      tvopt::generate_waypoints(config.seed, config.waypoint_count, 2), config.basis_size);
  const auto second = tvopt::fit_min_acceleration_path(
      tvopt::generate_waypoints(config.seed + 1, config.waypoint_count, 2), config.basis_size);

  const bool two_agent = config.scenario == tvopt::ScenarioKind::kTwoAgent;
  const tvopt::TrackingProblem problem =
      two_agent ? tvopt::two_agent_problem(first, second, config.radius)
                : tvopt::switching_objective(first, second, config.switch_time,
                                             config.switch_rate);

  struct Target {
    std::string name;
    tvopt::TimeVaryingScalarField field;
    bool interior = false;  // sample strictly feasible points
  };
  std::vector<Target> targets;
  targets.push_back({"objective", problem.objective, false});
  for (std::size_t i = 0; i < problem.constraint_count(); ++i)
    targets.push_back({"constraint_" + std::to_string(i + 1), problem.constraints[i], false});
  std::optional<tvopt::BarrierField> barrier;
  if (two_agent) {
    tvopt::ScheduleParams schedule = config.schedule;
    schedule.s0 = 0.0;
    barrier.emplace(problem, schedule);
    targets.push_back({"barrier", barrier->as_field(), true});
  }

  std::mt19937_64 engine(config.seed);
  auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

  constexpr double kTol = 1e-5;
  bool all_pass = true;
  for (const Target& target : targets) {
    double worst = 0.0;
    for (int sample = 0; sample < 100; ++sample) {
      const double t = 0.01 + 0.98 * uniform();
      tvopt::Vec x(target.field.dimension);
      if (target.interior) {
        // stay well inside each proximity disc
        for (std::size_t block = 0; block < 2; ++block) {
          const auto& path = block == 0 ? first : second;
          const tvopt::Vec base = path.position(t);
          const double angle = 6.283185307179586 * uniform();
          const double rho = 0.7 * config.radius * std::sqrt(uniform());
          x[2 * block] = base[0] + rho * std::cos(angle);
          x[2 * block + 1] = base[1] + rho * std::sin(angle);
        }
      } else {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = 2.0 * uniform() - 0.5;
      }
      const double h = 1e-6 * (1.0 + x.norm());
      const auto report = tvopt::validate_derivatives(target.field, x, t, h, kTol);
      worst = std::max({worst, report.gradient.max_relative_error,
                        report.hessian.max_relative_error, report.time_cross.max_relative_error,
                        report.time_partial.max_relative_error});
      if (!report.pass()) all_pass = false;
    }
    std::printf("%-14s max relative error %.3e  %s\n", target.name.c_str(), worst,
                worst <= kTol ? "pass" : "FAIL");
  }
  return all_pass ? kExitPass : kExitCheckFailed;
}

int sweep_command(const CliOptions& options) {
  tvopt::RunConfig base = build_config(options);
  const std::vector<double> sigmas =
      options.sigma.empty() ? std::vector<double>{base.sigma.value_or(
                                  base.scenario == tvopt::ScenarioKind::kSwitching ? 10.0 : 50.0)}
                            : options.sigma;
  const std::vector<double> gammas =
      options.gamma_c.empty() ? std::vector<double>{base.schedule.gamma_c} : options.gamma_c;
  const std::vector<double> alphas =
      options.alpha.empty() ? std::vector<double>{base.schedule.alpha} : options.alpha;

  std::ostringstream table;
  table << "sigma,gamma_c,alpha,final_err,rate,r2,max_violation,steps,rejects,pass\n";
  bool all_pass = true;
  for (double sigma : sigmas)
    for (double gamma : gammas)
      for (double alpha : alphas) {
        tvopt::RunConfig config = base;
        config.sigma = sigma;
        config.schedule.gamma_c = gamma;
        config.schedule.alpha = alpha;
        config.output_path.clear();
        const tvopt::RunTrace trace = tvopt::run_scenario(config);
        const tvopt::RunSummary summary = tvopt::summarize(trace);
        all_pass = all_pass && summary.pass;
        char row[256];
        std::snprintf(row, sizeof(row), "%g,%g,%g,%.9e,%.6g,%.6g,%.3e,%zu,%zu,%d\n", sigma, gamma,
                      alpha, summary.final_error, summary.fitted_rate, summary.fit_r_squared,
                      summary.max_bound_violation, summary.steps, summary.rejects,
                      summary.pass ? 1 : 0);
        table << row;
      }

  if (options.out.empty()) {
    std::fputs(table.str().c_str(), stdout);
  } else {
    std::ofstream file(options.out, std::ios::binary);
    if (!file) throw std::runtime_error("sweep: cannot open " + options.out);
    file << table.str();
  }
  return all_pass ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-varying tracking flows: run, validate, sweep"};
  app.require_subcommand(1);

  CliOptions run_options;
  CLI::App* run = app.add_subcommand("run", "integrate a scenario and summarize the trace");
  add_common_options(run, &run_options);

  CliOptions validate_options;
  CLI::App* validate =
      app.add_subcommand("validate", "check analytic derivatives against finite differences");
  add_common_options(validate, &validate_options);

  CliOptions sweep_options;
  CLI::App* sweep =
      app.add_subcommand("sweep", "grid over sigma, gamma-c, alpha; one summary row per cell");
  add_common_options(sweep, &sweep_options);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_options);
    if (validate->parsed()) return validate_command(validate_options);
    if (sweep->parsed()) return sweep_command(sweep_options);
  } catch (const std::exception& failure) {
    std::fprintf(stderr, "error: %s\n", failure.what());
    return kExitRuntimeError;
  }
  return kExitRuntimeError;
}
