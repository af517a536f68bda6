#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sparsact/types.hpp"

namespace sparsact {

enum class BDistribution { uniform01, gaussian, identity };

// "uniform" | "gaussian" | "identity"; anything else is an input error.
BDistribution parse_b_distribution(const std::string& name);
std::string to_string(BDistribution dist);

// Input matrix draw: uniform entries in [0, 1), standard normal entries, or
// I_n (requires m = n, ignores the seed).
MatrixXd random_b(int n, int m, BDistribution dist, uint64_t seed);

// Uniformly samples an s-subset of {0..m-1} per step (Fisher-Yates prefix).
ActuatorSchedule random_feasible_schedule(int m, int K, int s, uint64_t seed);

// "3" -> {3}; "1,2,8" -> {1,2,8}; "1:5" -> {1,2,3,4,5}.
std::vector<int> parse_index_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

struct ExperimentSpec {
  std::string experiment;  // energy-vs-s | relative-energy | mse-vs-time |
                           // mse-vs-s | mse-vs-m | mse-vs-xf | mse-vs-x0
  int n = 20;
  int m = 0;  // 0: defaults to n
  int p = 0;  // 0: defaults to n
  std::vector<int> s_values;
  std::vector<int> m_values;  // mse-vs-m sweep; defaults to {m}
  int k = 0;  // horizon for energy experiments; 0: ceil(n/s) per s
  int horizon = 40;
  int trials = 20;
  double sigma2 = 1e-4;
  std::vector<double> sigma2_values;  // defaults to {sigma2}
  BDistribution b_dist = BDistribution::gaussian;
  uint64_t seed = 0;
  bool has_seed = false;
  std::string out;
  // Dynamics source: bundled graph file when set, else Erdos-Renyi with
  // edge_prob (library default when absent).
  std::string graph_path;
  std::optional<double> edge_prob;
  std::vector<double> xf_norms;  // mse-vs-xf sweep
  std::vector<double> x0_norms;  // mse-vs-x0 sweep
};

struct CsvTable {
  std::vector<std::string> metadata;  // '#'-prefixed lines, no newline
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;
};

// Runs the named experiment and returns its table; also writes it to
// spec.out when that is nonempty. Rows that hit rank-deficient trials carry
// status partial:<ok>/<total> or fails; infeasible parameter combinations
// yield a row marked infeasible instead of aborting the sweep.
CsvTable run_experiment(const ExperimentSpec& spec);

}  // namespace sparsact
