#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "sparsact/control.hpp"
#include "sparsact/errors.hpp"
#include "sparsact/experiments.hpp"
#include "sparsact/gramian.hpp"
#include "sparsact/graph.hpp"
#include "sparsact/noisy_control.hpp"
#include "sparsact/rng.hpp"
#include "sparsact/scheduler.hpp"
#include "sparsact/sparse_recovery.hpp"

namespace {

using sparsact::ActuatorSchedule;
using sparsact::LinearSystem;
using sparsact::MatrixXd;
using sparsact::NoiseModel;
using sparsact::VectorXd;

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

using Setter = std::function<void(const std::string&)>;
using SetterMap = std::map<std::string, Setter>;

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::string normalize_key(std::string key) {
  for (char& ch : key) {
    if (ch == '-') ch = '_';
  }
  return key;
}

// key=value lines, '#' comments; values set here override command-line
// flags.
void apply_config(const std::string& path, const SetterMap& setters) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path);
  }
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto equals = line.find('=');
    if (equals == std::string::npos) {
      throw std::invalid_argument("config line " +
                                  std::to_string(line_number) +
                                  ": expected key=value");
    }
    const std::string key = normalize_key(trim(line.substr(0, equals)));
    const std::string value = trim(line.substr(equals + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::invalid_argument("config line " +
                                  std::to_string(line_number) +
                                  ": unknown key '" + key + "'");
    }
    it->second(value);
  }
}

int parse_int_value(const std::string& value) {
  size_t consumed = 0;
  const int parsed = std::stoi(value, &consumed);
  if (consumed != value.size()) {
    throw std::invalid_argument("expected an integer, got '" + value + "'");
  }
  return parsed;
}

double parse_double_value(const std::string& value) {
  size_t consumed = 0;
  const double parsed = std::stod(value, &consumed);
  if (consumed != value.size()) {
    throw std::invalid_argument("expected a number, got '" + value + "'");
  }
  return parsed;
}

uint64_t parse_seed_value(const std::string& value) {
  size_t consumed = 0;
  const uint64_t parsed = std::stoull(value, &consumed);
  if (consumed != value.size()) {
    throw std::invalid_argument("expected a seed, got '" + value + "'");
  }
  return parsed;
}

// Shared system-construction flags for the scheduling subcommands.
struct SystemFlags {
  int n = 20;
  int m = 0;  // 0: n
  std::string b_dist = "gaussian";
  std::string graph;
  double edge_prob = -1.0;  // negative: library default
  uint64_t seed = 0;
  bool seed_set = false;
};

void add_system_flags(CLI::App* cmd, SystemFlags* flags, SetterMap* setters) {
  cmd->add_option("--n", flags->n, "State dimension (ignored with --graph)");
  cmd->add_option("--m", flags->m, "Number of actuators (default n)");
  cmd->add_option("--b-dist", flags->b_dist,
                  "Input matrix draw: uniform | gaussian | identity");
  cmd->add_option("--graph", flags->graph,
                  "Edge list file defining the dynamics");
  cmd->add_option("--edge-prob", flags->edge_prob,
                  "Random-graph edge probability (default 2 ln(n)/n)");
  cmd->add_option("--seed", flags->seed, "Random seed")
      ->each([flags](const std::string&) { flags->seed_set = true; });
  (*setters)["n"] = [flags](const std::string& v) {
    flags->n = parse_int_value(v);
  };
  (*setters)["m"] = [flags](const std::string& v) {
    flags->m = parse_int_value(v);
  };
  (*setters)["b_dist"] = [flags](const std::string& v) { flags->b_dist = v; };
  (*setters)["graph"] = [flags](const std::string& v) { flags->graph = v; };
  (*setters)["edge_prob"] = [flags](const std::string& v) {
    flags->edge_prob = parse_double_value(v);
  };
  (*setters)["seed"] = [flags](const std::string& v) {
    flags->seed = parse_seed_value(v);
    flags->seed_set = true;
  };
}

LinearSystem build_system(const SystemFlags& flags) {
  MatrixXd a;
  int n = flags.n;
  if (!flags.graph.empty()) {
    a = sparsact::graph_to_system(sparsact::load_edge_list(flags.graph));
    n = static_cast<int>(a.rows());
  } else {
    if (!flags.seed_set) {
      throw std::invalid_argument(
          "--seed is required when the dynamics are randomly generated");
    }
    std::optional<double> edge_prob;
    if (flags.edge_prob >= 0.0) edge_prob = flags.edge_prob;
    a = sparsact::erdos_renyi_system(n, sparsact::mix_seed(flags.seed, 1),
                                     edge_prob);
  }
  const int m = flags.m > 0 ? flags.m : n;
  const auto dist = sparsact::parse_b_distribution(flags.b_dist);
  if (dist != sparsact::BDistribution::identity && !flags.seed_set) {
    throw std::invalid_argument(
        "--seed is required when B is randomly generated");
  }
  MatrixXd b =
      sparsact::random_b(n, m, dist, sparsact::mix_seed(flags.seed, 2));
  return LinearSystem(std::move(a), std::move(b));
}

void write_text_output(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(out);
  if (!file) {
    throw std::runtime_error("cannot write output file: " + out);
  }
  file << text;
}

ActuatorSchedule make_schedule(const LinearSystem& sys,
                               const std::string& algorithm, int s, int K,
                               uint64_t seed, bool seed_set) {
  if (algorithm == "rank") {
    return sparsact::controllable_schedule(sys, s, K);
  }
  if (algorithm == "energy-aware") {
    return sparsact::energy_aware_controllable_schedule(sys, s, K);
  }
  if (algorithm == "greedy") {
    ActuatorSchedule initial = sparsact::controllable_schedule(sys, s, K);
    return sparsact::rbn_greedy(sys, s, K, initial).schedule;
  }
  if (algorithm == "random") {
    if (!seed_set) {
      throw std::invalid_argument("--seed is required for random schedules");
    }
    return sparsact::random_feasible_schedule(sys.m(), K, s,
                                              sparsact::mix_seed(seed, 3));
  }
  throw std::invalid_argument(
      "unknown algorithm '" + algorithm +
      "' (expected rank, energy-aware, greedy, or random)");
}

int run_schedule(const SystemFlags& system_flags, int s, int K,
                 const std::string& algorithm, const std::string& out) {
  LinearSystem sys = build_system(system_flags);
  const int horizon = K > 0 ? K : (sys.n() + s - 1) / s;
  ActuatorSchedule schedule = make_schedule(
      sys, algorithm, s, horizon, system_flags.seed, system_flags.seed_set);
  write_text_output(out, sparsact::schedule_to_string(schedule));
  sparsact::GramianReport report = sparsact::gramian(sys, schedule);
  std::cerr << "rank " << report.rank << " of " << sys.n() << "\n";
  if (report.trace_inverse) {
    std::cerr << "avg_energy " << *report.trace_inverse << "\n";
  }
  return 0;
}

int run_energy(const SystemFlags& system_flags, int s, int K,
               const std::string& algorithm,
               const std::string& schedule_file, double eps,
               const std::string& out) {
  LinearSystem sys = build_system(system_flags);
  ActuatorSchedule schedule = [&] {
    if (!schedule_file.empty()) {
      std::ifstream in(schedule_file);
      if (!in) {
        throw std::invalid_argument("cannot open schedule file: " +
                                    schedule_file);
      }
      return sparsact::read_schedule(in);
    }
    const int horizon = K > 0 ? K : (sys.n() + s - 1) / s;
    return make_schedule(sys, algorithm, s, horizon, system_flags.seed,
                         system_flags.seed_set);
  }();
  sparsact::GramianReport report = sparsact::gramian(sys, schedule);
  std::ostringstream text;
  text << "horizon " << schedule.horizon() << "\n";
  text << "selected " << schedule.total_selected() << "\n";
  text << "rank " << report.rank << "\n";
  text << "lambda_min " << report.lambda_min << "\n";
  text << "lambda_max " << report.lambda_max << "\n";
  if (report.trace_inverse) {
    text << "avg_energy " << *report.trace_inverse << "\n";
  } else {
    text << "avg_energy unavailable (rank deficient)\n";
  }
  if (eps > 0.0) {
    text << "regularized_energy "
         << sparsact::regularized_energy(report.w, eps) << "\n";
  }
  write_text_output(out, text.str());
  return 0;
}

int run_track(const SystemFlags& system_flags, int p, int s, int horizon,
              int trials, double sigma2, double xf_norm, double x0_norm,
              double reg_q, double reg_r, const std::string& out) {
  if (!system_flags.seed_set) {
    throw std::invalid_argument("--seed is required for tracking runs");
  }
  LinearSystem sys = build_system(system_flags);
  const int n = sys.n();
  if (p > 0 && p != n) {
    throw std::invalid_argument(
        "tracking measures the full state; --p must equal n when given");
  }
  NoiseModel noise{sigma2 * MatrixXd::Identity(n, n),
                   sigma2 * MatrixXd::Identity(n, n)};
  std::mt19937_64 engine =
      sparsact::make_engine(sparsact::mix_seed(system_flags.seed, 6));
  VectorXd xf = xf_norm * sparsact::random_unit_vector(n, engine);
  sparsact::TrackingOptions options;
  if (x0_norm != 0.0) {
    options.x0 = x0_norm * sparsact::random_unit_vector(n, engine);
  }
  if (reg_q >= 0.0 || reg_r > 0.0) {
    if (!(reg_r > 0.0)) {
      throw std::invalid_argument(
          "--reg-r must be positive when regularizing");
    }
    sparsact::Regularizers reg;
    reg.q = std::max(reg_q, 0.0) * MatrixXd::Identity(n, n);
    reg.r = reg_r * MatrixXd::Identity(sys.m(), sys.m());
    options.regularizers = reg;
  }
  sparsact::DecayFactorEstimate xi = sparsact::decay_factor(
      sys.B(), 2000, sparsact::mix_seed(system_flags.seed, 5));
  options.xi = xi.value;

  sparsact::TrackingRun run =
      sparsact::track(sys, noise, xf, s, horizon, trials,
                      sparsact::mix_seed(system_flags.seed, 4), options);

  std::vector<std::string> metadata = {
      "n=" + std::to_string(n),
      "m=" + std::to_string(sys.m()),
      "s=" + std::to_string(s),
      "horizon=" + std::to_string(horizon),
      "trials=" + std::to_string(trials),
      "sigma2=" + std::to_string(sigma2),
      "seed=" + std::to_string(system_flags.seed),
      "xi=" + std::to_string(xi.value) +
          (xi.is_lower_estimate ? " (sampled lower estimate)"
                                : " (analytic)"),
  };
  std::ostringstream text;
  sparsact::write_tracking_csv(text, run, metadata);
  write_text_output(out, text.str());

  std::cerr << "steady_mse " << run.steady_mse << " (se "
            << run.steady_mse_se << ")\n";
  if (run.floor) std::cerr << "floor " << *run.floor << "\n";
  if (run.bound) {
    std::cerr << "bound " << *run.bound << "\n";
  } else if (options.xi && !run.bound_condition_holds) {
    std::cerr << "bound undefined at this sparsity\n";
  }
  return 0;
}

int run_estimate_x0(const SystemFlags& system_flags, int p, int s, int K,
                    double sigma2, double x0_norm) {
  if (!system_flags.seed_set) {
    throw std::invalid_argument("--seed is required for this demonstration");
  }
  SystemFlags base = system_flags;
  base.m = base.n;  // inputs are irrelevant here; keep B square identity
  base.b_dist = "identity";
  MatrixXd a;
  int n = base.n;
  if (!base.graph.empty()) {
    a = sparsact::graph_to_system(sparsact::load_edge_list(base.graph));
    n = static_cast<int>(a.rows());
  } else {
    std::optional<double> edge_prob;
    if (base.edge_prob >= 0.0) edge_prob = base.edge_prob;
    a = sparsact::erdos_renyi_system(n, sparsact::mix_seed(base.seed, 1),
                                     edge_prob);
  }
  const int rows = p > 0 ? p : n;
  std::mt19937_64 engine =
      sparsact::make_engine(sparsact::mix_seed(base.seed, 7));
  MatrixXd c = sparsact::gaussian_matrix(rows, n, engine);
  LinearSystem sys(a, MatrixXd::Identity(n, n), c);

  const int budget = s > 0 ? s : 1;
  const int horizon = K > 0 ? K : (n + budget - 1) / budget;
  sparsact::SensorSchedule schedule =
      sparsact::sensor_schedule(sys, budget, horizon);

  VectorXd x0 = x0_norm * sparsact::random_unit_vector(n, engine);
  std::vector<VectorXd> zero_inputs(horizon, VectorXd::Zero(n));
  ActuatorSchedule empty_schedule(
      std::vector<std::vector<int>>(horizon), 0);
  sparsact::PiecewiseSparseInput no_input(zero_inputs, empty_schedule);
  NoiseModel noise{sigma2 * MatrixXd::Identity(n, n),
                   sigma2 * MatrixXd::Identity(rows, rows)};
  std::optional<NoiseModel> maybe_noise;
  if (sigma2 > 0.0) maybe_noise = noise;
  sparsact::SimulationResult sim = sparsact::simulate(
      sys, x0, no_input, maybe_noise, sparsact::mix_seed(base.seed, 8));

  std::vector<VectorXd> measurements(sim.measurements.begin(),
                                     sim.measurements.begin() + horizon);
  VectorXd estimate = sparsact::estimate_x0(sys, schedule, measurements);
  const double error = (estimate - x0).norm();
  std::cout << "n " << n << "\n";
  std::cout << "sensors_per_step " << budget << "\n";
  std::cout << "horizon " << horizon << "\n";
  std::cout << "rows_used " << schedule.total_selected() << "\n";
  std::cout << "error_norm " << error << "\n";
  std::cout << "relative_error " << error / std::max(x0.norm(), 1e-300)
            << "\n";
  return 0;
}

int run_experiment_cmd(sparsact::ExperimentSpec spec,
                       const std::string& s_text, const std::string& m_text,
                       const std::string& xf_norms_text,
                       const std::string& x0_norms_text,
                       const std::string& sigma2_list_text) {
  if (!s_text.empty()) spec.s_values = sparsact::parse_index_list(s_text);
  if (!m_text.empty()) {
    spec.m_values = sparsact::parse_index_list(m_text);
    if (spec.m_values.size() == 1) spec.m = spec.m_values.front();
  }
  if (!xf_norms_text.empty()) {
    spec.xf_norms = sparsact::parse_double_list(xf_norms_text);
  }
  if (!x0_norms_text.empty()) {
    spec.x0_norms = sparsact::parse_double_list(x0_norms_text);
  }
  if (!sigma2_list_text.empty()) {
    spec.sigma2_values = sparsact::parse_double_list(sigma2_list_text);
  }
  if (spec.out.empty()) spec.out = spec.experiment + ".csv";
  sparsact::run_experiment(spec);
  std::cerr << "wrote " << spec.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Sparse actuator scheduling and tracking for linear "
      "network systems"};
  app.require_subcommand(1);
  argv = app.ensure_utf8(argv);

  // schedule
  auto* schedule_cmd =
      app.add_subcommand("schedule", "Construct an actuator schedule");
  SystemFlags schedule_system;
  SetterMap schedule_setters;
  int schedule_s = 4, schedule_k = 0;
  std::string schedule_algorithm = "greedy";
  std::string schedule_out, schedule_config;
  add_system_flags(schedule_cmd, &schedule_system, &schedule_setters);
  schedule_cmd->add_option("--s", schedule_s, "Actuators per step");
  schedule_cmd->add_option("--k", schedule_k,
                           "Horizon (default ceil(n/s))");
  schedule_cmd->add_option(
      "--algorithm", schedule_algorithm,
      "rank | energy-aware | greedy | random (default greedy)");
  schedule_cmd->add_option("--out", schedule_out,
                           "Schedule file ('-' for stdout)");
  schedule_cmd->add_option("--config", schedule_config,
                           "key=value file overriding flags");
  schedule_setters["s"] = [&](const std::string& v) {
    schedule_s = parse_int_value(v);
  };
  schedule_setters["k"] = [&](const std::string& v) {
    schedule_k = parse_int_value(v);
  };
  schedule_setters["algorithm"] = [&](const std::string& v) {
    schedule_algorithm = v;
  };
  schedule_setters["out"] = [&](const std::string& v) { schedule_out = v; };

  // energy
  auto* energy_cmd = app.add_subcommand(
      "energy", "Report the Gramian spectrum and control energy");
  SystemFlags energy_system;
  SetterMap energy_setters;
  int energy_s = 4, energy_k = 0;
  std::string energy_algorithm = "greedy";
  std::string energy_schedule_file, energy_out, energy_config;
  double energy_eps = 0.0;
  add_system_flags(energy_cmd, &energy_system, &energy_setters);
  energy_cmd->add_option("--s", energy_s, "Actuators per step");
  energy_cmd->add_option("--k", energy_k, "Horizon (default ceil(n/s))");
  energy_cmd->add_option("--algorithm", energy_algorithm,
                         "Schedule construction when no file is given");
  energy_cmd->add_option("--schedule-file", energy_schedule_file,
                         "Read the schedule from a text file");
  energy_cmd->add_option("--eps", energy_eps,
                         "Also report trace((W + eps I)^-1)");
  energy_cmd->add_option("--out", energy_out, "Report file (default stdout)");
  energy_cmd->add_option("--config", energy_config,
                         "key=value file overriding flags");
  energy_setters["s"] = [&](const std::string& v) {
    energy_s = parse_int_value(v);
  };
  energy_setters["k"] = [&](const std::string& v) {
    energy_k = parse_int_value(v);
  };
  energy_setters["algorithm"] = [&](const std::string& v) {
    energy_algorithm = v;
  };
  energy_setters["schedule_file"] = [&](const std::string& v) {
    energy_schedule_file = v;
  };
  energy_setters["eps"] = [&](const std::string& v) {
    energy_eps = parse_double_value(v);
  };
  energy_setters["out"] = [&](const std::string& v) { energy_out = v; };

  // track
  auto* track_cmd = app.add_subcommand(
      "track", "Closed-loop sparse tracking under noise (CSV output)");
  SystemFlags track_system;
  SetterMap track_setters;
  int track_p = 0, track_s = 4, track_horizon = 40, track_trials = 20;
  double track_sigma2 = 1e-4, track_xf_norm = 1.0, track_x0_norm = 0.0;
  double track_reg_q = -1.0, track_reg_r = 0.0;
  std::string track_out, track_config;
  add_system_flags(track_cmd, &track_system, &track_setters);
  track_cmd->add_option("--p", track_p, "Measured outputs (must equal n)");
  track_cmd->add_option("--s", track_s, "Actuators per step");
  track_cmd->add_option("--horizon", track_horizon, "Steps per trial");
  track_cmd->add_option("--trials", track_trials, "Monte Carlo trials");
  track_cmd->add_option("--sigma2", track_sigma2,
                        "Process/measurement noise variance");
  track_cmd->add_option("--xf-norm", track_xf_norm,
                        "Norm of the random target state");
  track_cmd->add_option("--x0-norm", track_x0_norm,
                        "Norm of the random initial state");
  track_cmd->add_option("--reg-q", track_reg_q,
                        "State weight scale for regularized pursuit");
  track_cmd->add_option("--reg-r", track_reg_r,
                        "Input weight scale for regularized pursuit");
  track_cmd->add_option("--out", track_out, "CSV file ('-' for stdout)");
  track_cmd->add_option("--config", track_config,
                        "key=value file overriding flags");
  track_setters["p"] = [&](const std::string& v) {
    track_p = parse_int_value(v);
  };
  track_setters["s"] = [&](const std::string& v) {
    track_s = parse_int_value(v);
  };
  track_setters["horizon"] = [&](const std::string& v) {
    track_horizon = parse_int_value(v);
  };
  track_setters["trials"] = [&](const std::string& v) {
    track_trials = parse_int_value(v);
  };
  track_setters["sigma2"] = [&](const std::string& v) {
    track_sigma2 = parse_double_value(v);
  };
  track_setters["xf_norm"] = [&](const std::string& v) {
    track_xf_norm = parse_double_value(v);
  };
  track_setters["x0_norm"] = [&](const std::string& v) {
    track_x0_norm = parse_double_value(v);
  };
  track_setters["reg_q"] = [&](const std::string& v) {
    track_reg_q = parse_double_value(v);
  };
  track_setters["reg_r"] = [&](const std::string& v) {
    track_reg_r = parse_double_value(v);
  };
  track_setters["out"] = [&](const std::string& v) { track_out = v; };

  // experiment
  auto* experiment_cmd = app.add_subcommand(
      "experiment", "Run a named experiment and write its CSV");
  sparsact::ExperimentSpec experiment_spec;
  SetterMap experiment_setters;
  std::string experiment_s_text, experiment_m_text, experiment_config;
  std::string experiment_xf_norms, experiment_x0_norms,
      experiment_sigma2_list;
  std::string experiment_b_dist = "gaussian";
  experiment_cmd->add_option("name", experiment_spec.experiment,
                             "energy-vs-s | relative-energy | mse-vs-time | "
                             "mse-vs-s | mse-vs-m | mse-vs-xf | mse-vs-x0");
  experiment_cmd->add_option("--n", experiment_spec.n, "State dimension");
  experiment_cmd->add_option("--m", experiment_m_text,
                             "Actuator count or sweep (e.g. 20 or 20,40,80)");
  experiment_cmd->add_option("--p", experiment_spec.p, "Measured outputs");
  experiment_cmd->add_option("--s", experiment_s_text,
                             "Sparsity level(s), e.g. 4 or 1,2,4 or 1:8");
  experiment_cmd->add_option("--k", experiment_spec.k,
                             "Schedule horizon (default ceil(n/s))");
  experiment_cmd->add_option("--horizon", experiment_spec.horizon,
                             "Tracking steps per trial");
  experiment_cmd->add_option("--trials", experiment_spec.trials,
                             "Monte Carlo trials");
  experiment_cmd->add_option("--sigma2", experiment_spec.sigma2,
                             "Noise variance");
  experiment_cmd->add_option("--b-dist", experiment_b_dist,
                             "uniform | gaussian | identity");
  auto* experiment_seed_opt = experiment_cmd->add_option(
      "--seed", experiment_spec.seed, "Random seed (required)");
  experiment_cmd->add_option("--out", experiment_spec.out,
                             "CSV path (default <name>.csv)");
  experiment_cmd->add_option("--graph", experiment_spec.graph_path,
                             "Edge list file defining the dynamics");
  double experiment_edge_prob = -1.0;
  experiment_cmd->add_option("--edge-prob", experiment_edge_prob,
                             "Random-graph edge probability");
  experiment_cmd->add_option("--config", experiment_config,
                             "key=value file overriding flags");
  experiment_setters["name"] = [&](const std::string& v) {
    experiment_spec.experiment = v;
  };
  experiment_setters["experiment"] = experiment_setters["name"];
  experiment_setters["n"] = [&](const std::string& v) {
    experiment_spec.n = parse_int_value(v);
  };
  experiment_setters["m"] = [&](const std::string& v) {
    experiment_m_text = v;
  };
  experiment_setters["p"] = [&](const std::string& v) {
    experiment_spec.p = parse_int_value(v);
  };
  experiment_setters["s"] = [&](const std::string& v) {
    experiment_s_text = v;
  };
  experiment_setters["k"] = [&](const std::string& v) {
    experiment_spec.k = parse_int_value(v);
  };
  experiment_setters["horizon"] = [&](const std::string& v) {
    experiment_spec.horizon = parse_int_value(v);
  };
  experiment_setters["trials"] = [&](const std::string& v) {
    experiment_spec.trials = parse_int_value(v);
  };
  experiment_setters["sigma2"] = [&](const std::string& v) {
    experiment_spec.sigma2 = parse_double_value(v);
  };
  experiment_setters["sigma2_values"] = [&](const std::string& v) {
    experiment_sigma2_list = v;
  };
  experiment_setters["b_dist"] = [&](const std::string& v) {
    experiment_b_dist = v;
  };
  experiment_setters["seed"] = [&](const std::string& v) {
    experiment_spec.seed = parse_seed_value(v);
    experiment_spec.has_seed = true;
  };
  experiment_setters["out"] = [&](const std::string& v) {
    experiment_spec.out = v;
  };
  experiment_setters["graph"] = [&](const std::string& v) {
    experiment_spec.graph_path = v;
  };
  experiment_setters["edge_prob"] = [&](const std::string& v) {
    experiment_edge_prob = parse_double_value(v);
  };
  experiment_setters["xf_norms"] = [&](const std::string& v) {
    experiment_xf_norms = v;
  };
  experiment_setters["x0_norms"] = [&](const std::string& v) {
    experiment_x0_norms = v;
  };

  // estimate-x0
  auto* estimate_cmd = app.add_subcommand(
      "estimate-x0",
      "Recover an initial state from scheduled sensor readings");
  SystemFlags estimate_system;
  SetterMap estimate_setters;
  int estimate_p = 0, estimate_s = 1, estimate_k = 0;
  double estimate_sigma2 = 0.0, estimate_x0_norm = 1.0;
  std::string estimate_config;
  add_system_flags(estimate_cmd, &estimate_system, &estimate_setters);
  estimate_cmd->add_option("--p", estimate_p,
                           "Sensor rows in C (default n)");
  estimate_cmd->add_option("--s", estimate_s, "Sensors read per step");
  estimate_cmd->add_option("--k", estimate_k,
                           "Measurement horizon (default ceil(n/s))");
  estimate_cmd->add_option("--sigma2", estimate_sigma2,
                           "Noise variance (default noiseless)");
  estimate_cmd->add_option("--x0-norm", estimate_x0_norm,
                           "Norm of the hidden initial state");
  estimate_cmd->add_option("--config", estimate_config,
                           "key=value file overriding flags");
  estimate_setters["p"] = [&](const std::string& v) {
    estimate_p = parse_int_value(v);
  };
  estimate_setters["s"] = [&](const std::string& v) {
    estimate_s = parse_int_value(v);
  };
  estimate_setters["k"] = [&](const std::string& v) {
    estimate_k = parse_int_value(v);
  };
  estimate_setters["sigma2"] = [&](const std::string& v) {
    estimate_sigma2 = parse_double_value(v);
  };
  estimate_setters["x0_norm"] = [&](const std::string& v) {
    estimate_x0_norm = parse_double_value(v);
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (schedule_cmd->parsed()) {
      if (!schedule_config.empty()) {
        apply_config(schedule_config, schedule_setters);
      }
      return run_schedule(schedule_system, schedule_s, schedule_k,
                          schedule_algorithm, schedule_out);
    }
    if (energy_cmd->parsed()) {
      if (!energy_config.empty()) {
        apply_config(energy_config, energy_setters);
      }
      return run_energy(energy_system, energy_s, energy_k, energy_algorithm,
                        energy_schedule_file, energy_eps, energy_out);
    }
    if (track_cmd->parsed()) {
      if (!track_config.empty()) {
        apply_config(track_config, track_setters);
      }
      return run_track(track_system, track_p, track_s, track_horizon,
                       track_trials, track_sigma2, track_xf_norm,
                       track_x0_norm, track_reg_q, track_reg_r, track_out);
    }
    if (experiment_cmd->parsed()) {
      experiment_spec.has_seed = experiment_seed_opt->count() > 0;
      if (!experiment_config.empty()) {
        apply_config(experiment_config, experiment_setters);
      }
      experiment_spec.b_dist =
          sparsact::parse_b_distribution(experiment_b_dist);
      if (experiment_edge_prob >= 0.0) {
        experiment_spec.edge_prob = experiment_edge_prob;
      }
      if (experiment_spec.experiment.empty()) {
        throw std::invalid_argument("an experiment name is required");
      }
      return run_experiment_cmd(experiment_spec, experiment_s_text,
                                experiment_m_text, experiment_xf_norms,
                                experiment_x0_norms,
                                experiment_sigma2_list);
    }
    if (estimate_cmd->parsed()) {
      if (!estimate_config.empty()) {
        apply_config(estimate_config, estimate_setters);
      }
      return run_estimate_x0(estimate_system, estimate_p, estimate_s,
                             estimate_k, estimate_sigma2, estimate_x0_norm);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const sparsact::PreconditionError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const sparsact::NotControllableError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const sparsact::BoundUndefinedError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const sparsact::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
