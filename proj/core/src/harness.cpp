#include "tvopt/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tvopt/barrier.hpp"
#include "tvopt/errors.hpp"

namespace tvopt {

namespace {

std::string format_number(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

double default_sigma(ScenarioKind kind) {
  return kind == ScenarioKind::kSwitching ? 10.0 : 50.0;
}

GainMatrix resolve_gain(const RunConfig& config, std::size_t dimension) {
  const double sigma = config.sigma.value_or(default_sigma(config.scenario));
  if (config.gain) return GainMatrix(*config.gain, sigma);
  return GainMatrix::isotropic(dimension, sigma);
}

TrackingProblem build_problem(const RunConfig& config) {
  const PolynomialPath first = fit_min_acceleration_path(
      generate_waypoints(config.seed, config.waypoint_count, 2), config.basis_size);
  const PolynomialPath second = fit_min_acceleration_path(
      generate_waypoints(config.seed + 1, config.waypoint_count, 2), config.basis_size);
  if (config.scenario == ScenarioKind::kSwitching)
    return switching_objective(first, second, config.switch_time, config.switch_rate);
  return two_agent_problem(first, second, config.radius);
}

}  // namespace

RunTrace run_scenario(const RunConfig& config) {
  if (!(config.t_end >= 0.0)) throw std::invalid_argument("run_scenario: t_end must be >= 0");
  if (!(config.oracle_tol > 0.0))
    throw std::invalid_argument("run_scenario: oracle tolerance must be positive");

  const TrackingProblem problem = build_problem(config);
  const std::size_t n = problem.dimension();
  const std::size_t p = problem.constraint_count();

  Vec x0 = config.start.value_or(Vec(n));
  if (x0.size() != n) throw std::invalid_argument("run_scenario: start point has wrong dimension");

  ScheduleParams schedule = config.schedule;
  if (p > 0 && config.auto_slack)
    schedule.s0 = config.slack_epsilon ? initial_slack(problem, x0, *config.slack_epsilon)
                                       : initial_slack(problem, x0);

  const GainMatrix gain = resolve_gain(config, n);

  RunTrace trace;
  trace.dimension = n;
  trace.constraint_count = p;
  trace.sigma = gain.sigma();
  trace.t_end = config.t_end;

  FlowState start;
  start.t = 0.0;
  start.x = x0;

  FlowTrace flow_trace;
  std::optional<BarrierField> barrier;
  if (p == 0) {
    flow_trace = integrate(unconstrained_flow(problem, gain), start, config.t_end,
                           config.integrator);
  } else {
    barrier.emplace(problem, schedule);
    flow_trace = integrate(interior_point_flow(*barrier, gain), start, config.t_end,
                           config.integrator);
  }
  trace.final_state = flow_trace.final_state;
  trace.regularization_count = flow_trace.regularization_count;

  // frozen-time references at the sampled states, warm-started along t
  std::optional<Vec> hint_star;
  std::optional<Vec> hint_tilde;
  trace.records.reserve(flow_trace.samples.size());
  for (const FlowState& sample : flow_trace.samples) {
    TraceRecord record;
    record.t = sample.t;
    record.x = sample.x;
    record.steps = sample.step_count;
    record.rejects = sample.reject_count;

    try {
      if (p == 0) {
        const StaticSolution reference = static_minimize_unconstrained(
            problem.objective, sample.t, hint_star.value_or(sample.x), config.oracle_tol);
        record.x_star = reference.x_star;
        record.grad_norm = problem.objective.gradient(sample.x, sample.t).norm();
        hint_star = record.x_star;
      } else {
        const double s = slack(schedule, sample.t).value;
        const StaticSolution constrained =
            static_solve_constrained(problem, sample.t, config.oracle_tol, hint_star);
        const StaticSolution perturbed =
            s == 0.0 ? constrained
                     : static_solve_perturbed(problem, sample.t, s, config.oracle_tol, hint_tilde);
        record.x_star = constrained.x_star;
        record.lambda_star = constrained.lambda_star;
        record.x_tilde = perturbed.x_star;
        record.z_tilde =
            static_barrier_minimizer(*barrier, sample.t, config.oracle_tol, sample.x);
        record.bounds =
            evaluate_bounds(problem, schedule, sample.t, record.z_tilde, constrained, perturbed);
        record.grad_norm = barrier->gradient(sample.x, sample.t).norm();
        hint_star = record.x_star;
        hint_tilde = record.x_tilde;
      }
    } catch (const InfeasibleAtTime&) {
      throw;  // already carries the sample time
    } catch (const Error& failure) {
      throw Error(std::string(failure.what()) + " (at sample t = " + format_number(sample.t) +
                  ")");
    }

    record.error = (record.x - record.x_star).norm();
    record.constraint_values = Vec(p);
    for (std::size_t i = 0; i < p; ++i)
      record.constraint_values[i] = problem.constraints[i].value(sample.x, sample.t);
    trace.records.push_back(std::move(record));
  }

  if (!config.output_path.empty()) emit_csv(trace, config.output_path);
  return trace;
}

DecayFit fit_decay_rate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 10)
    throw std::invalid_argument("fit_decay_rate: need at least 10 samples");
  double mean_t = 0.0;
  double mean_log = 0.0;
  for (const auto& [t, value] : samples) {
    if (!(value > 0.0)) throw NonPositiveValue("fit_decay_rate: values must be positive");
    mean_t += t;
    mean_log += std::log(value);
  }
  const double count = static_cast<double>(samples.size());
  mean_t /= count;
  mean_log /= count;

  double stt = 0.0, sll = 0.0, stl = 0.0;
  for (const auto& [t, value] : samples) {
    const double dt = t - mean_t;
    const double dl = std::log(value) - mean_log;
    stt += dt * dt;
    sll += dl * dl;
    stl += dt * dl;
  }
  if (!(stt > 0.0)) throw std::invalid_argument("fit_decay_rate: sample times are degenerate");

  DecayFit fit;
  fit.rate = -stl / stt;
  fit.r_squared = sll > 0.0 ? (stl * stl) / (stt * sll) : 1.0;
  return fit;
}

std::string format_csv(const RunTrace& trace) {
  std::ostringstream out;
  out << "t";
  for (std::size_t i = 0; i < trace.dimension; ++i) out << ",x_" << i;
  for (std::size_t i = 0; i < trace.dimension; ++i) out << ",xstar_" << i;
  out << ",err,grad_norm";
  for (std::size_t i = 1; i <= trace.constraint_count; ++i) out << ",f_" << i;
  out << ",pert_gap,pert_bound,barrier_gap,barrier_bound,steps,rejects\n";

  for (const TraceRecord& record : trace.records) {
    out << format_number(record.t);
    for (std::size_t i = 0; i < trace.dimension; ++i) out << ',' << format_number(record.x[i]);
    for (std::size_t i = 0; i < trace.dimension; ++i)
      out << ',' << format_number(record.x_star[i]);
    out << ',' << format_number(record.error) << ',' << format_number(record.grad_norm);
    for (std::size_t i = 0; i < trace.constraint_count; ++i)
      out << ',' << format_number(record.constraint_values[i]);
    out << ',' << format_number(record.bounds.perturbation_gap) << ','
        << format_number(record.bounds.perturbation_bound) << ','
        << format_number(record.bounds.barrier_gap) << ','
        << format_number(record.bounds.barrier_bound) << ',' << record.steps << ','
        << record.rejects << '\n';
  }
  return out.str();
}

void emit_csv(const RunTrace& trace, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("emit_csv: cannot open " + path);
  const std::string body = format_csv(trace);
  file.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!file) throw std::runtime_error("emit_csv: write failed for " + path);
}

RunSummary summarize(const RunTrace& trace) {
  RunSummary summary;
  summary.pass = true;
  if (trace.records.empty()) {
    summary.text = "empty trace\n";
    return summary;
  }

  const TraceRecord& last = trace.records.back();
  summary.final_error = last.error;
  summary.steps = last.steps;
  summary.rejects = last.rejects;

  std::vector<std::pair<double, double>> window;
  for (const TraceRecord& record : trace.records)
    if (record.t >= 0.05 * trace.t_end && record.t <= 0.45 * trace.t_end &&
        record.grad_norm > 0.0)
      window.emplace_back(record.t, record.grad_norm);
  if (window.size() >= 10) {
    const DecayFit fit = fit_decay_rate(window);
    summary.fitted_rate = fit.rate;
    summary.fit_r_squared = fit.r_squared;
  }

  for (const TraceRecord& record : trace.records) {
    if (trace.constraint_count > 0 && !(record.bounds.perturbation_ok && record.bounds.barrier_ok))
      summary.pass = false;
    const double violation = std::max(
        {0.0, record.bounds.perturbation_gap - record.bounds.perturbation_bound,
         -record.bounds.perturbation_gap, record.bounds.barrier_gap - record.bounds.barrier_bound,
         -record.bounds.barrier_gap});
    summary.max_bound_violation = std::max(summary.max_bound_violation, violation);
  }

  std::ostringstream text;
  text << "samples:             " << trace.records.size() << '\n'
       << "final time:          " << format_number(last.t) << '\n'
       << "final error:         " << format_number(summary.final_error) << '\n'
       << "fitted decay rate:   " << format_number(summary.fitted_rate) << " (r^2 "
       << format_number(summary.fit_r_squared) << ", sigma " << format_number(trace.sigma) << ")\n"
       << "max bound violation: " << format_number(summary.max_bound_violation) << '\n'
       << "steps / rejects:     " << summary.steps << " / " << summary.rejects << '\n'
       << "regularizations:     " << trace.regularization_count << '\n'
       << "bound checks:        " << (summary.pass ? "pass" : "FAIL") << '\n';
  summary.text = text.str();
  return summary;
}

bool emit_summary(const RunTrace& trace) {
  const RunSummary summary = summarize(trace);
  std::fputs(summary.text.c_str(), stdout);
  return summary.pass;
}

namespace {

std::string trim(const std::string& raw) {
  const auto begin = raw.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = raw.find_last_not_of(" \t\r");
  return raw.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
  auto as_double = [&value, &key] {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad numeric value for " + key);
    }
  };
  auto as_count = [&value, &key] {
    try {
      return static_cast<std::size_t>(std::stoull(value));
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad count for " + key);
    }
  };

  if (key == "scenario") {
    if (value == "switching")
      config.scenario = ScenarioKind::kSwitching;
    else if (value == "two-agent")
      config.scenario = ScenarioKind::kTwoAgent;
    else
      throw std::invalid_argument("config: unknown scenario '" + value + "'");
  } else if (key == "seed") {
    config.seed = std::stoull(value);
  } else if (key == "waypoints") {
    config.waypoint_count = as_count();
  } else if (key == "degree") {
    config.basis_size = as_count();
  } else if (key == "t_int") {
    config.switch_time = as_double();
  } else if (key == "gamma_switch") {
    config.switch_rate = as_double();
  } else if (key == "r") {
    config.radius = as_double();
  } else if (key == "sigma") {
    config.sigma = as_double();
  } else if (key == "c0") {
    config.schedule.c0 = as_double();
  } else if (key == "gamma_c") {
    config.schedule.gamma_c = as_double();
  } else if (key == "alpha") {
    config.schedule.alpha = as_double();
  } else if (key == "s0") {
    if (value == "auto") {
      config.auto_slack = true;
    } else {
      config.auto_slack = false;
      config.schedule.s0 = as_double();
    }
  } else if (key == "epsilon") {
    config.slack_epsilon = as_double();
  } else if (key == "t_end") {
    config.t_end = as_double();
  } else if (key == "max_step") {
    config.integrator.max_step = as_double();
  } else if (key == "min_step") {
    config.integrator.min_step = as_double();
  } else if (key == "shrink") {
    config.integrator.shrink = as_double();
  } else if (key == "sample_interval") {
    config.integrator.sample_interval = as_double();
  } else if (key == "oracle_tol") {
    config.oracle_tol = as_double();
  } else if (key == "out") {
    config.output_path = value;
  } else if (key == "x0") {
    std::stringstream parts(value);
    std::string item;
    std::vector<double> entries;
    while (std::getline(parts, item, ','))
      entries.push_back(std::stod(trim(item)));
    Vec x0(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) x0[i] = entries[i];
    config.start = std::move(x0);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("config: cannot open " + path);
  RunConfig config;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto equals = body.find('=');
    if (equals == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_number) +
                                  " is not key=value");
    apply_config_entry(config, trim(body.substr(0, equals)), trim(body.substr(equals + 1)));
  }
  return config;
}

}  // namespace tvopt
