#include "sparsact/scheduler.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sparsact/errors.hpp"
#include "sparsact/gramian.hpp"

namespace sparsact {

namespace {

std::vector<MatrixXd> matrix_powers(const MatrixXd& a, int count) {
  std::vector<MatrixXd> powers;
  powers.reserve(count);
  powers.push_back(MatrixXd::Identity(a.rows(), a.cols()));
  for (int i = 1; i < count; ++i) {
    powers.push_back(a * powers.back());
  }
  return powers;
}

void check_schedule_preconditions(const LinearSystem& sys, int s, int K,
                                  RankTolerance tol, const char* b_name,
                                  const MatrixXd& b) {
  const int n = sys.n();
  if (numerical_rank(b, tol) < n) {
    throw PreconditionError(std::string(b_name) +
                            " must have full row rank n");
  }
  const int s_min = std::max(1, n - numerical_rank(sys.A(), tol));
  if (s < s_min) {
    throw PreconditionError(
        "sparsity budget " + std::to_string(s) +
        " is below max(1, n - rank(A)) = " + std::to_string(s_min));
  }
  const int k_min = (n + s - 1) / s;
  if (K < k_min) {
    throw PreconditionError("horizon " + std::to_string(K) +
                            " is below ceil(n/s) = " + std::to_string(k_min));
  }
}

// Each pick takes the candidate with the largest residual against the
// current span, so a step's margins are as large as its block allows; an
// in-order scan can walk into near-dependent picks whose joint numerical
// rank collapses. Ties resolve to the lowest index. Residuals only shrink
// as the basis grows, so candidates below threshold drop out permanently.
std::vector<int> pivoted_extension(IncrementalBasis& basis,
                                   const MatrixXd& candidates, int limit,
                                   RankTolerance tol) {
  const int count = static_cast<int>(candidates.cols());
  std::vector<int> chosen;
  std::vector<char> dropped(count, 0);
  while (static_cast<int>(chosen.size()) < limit) {
    int best_j = -1;
    double best_norm = 0.0;
    for (int j = 0; j < count; ++j) {
      if (dropped[j]) continue;
      const double scale =
          std::max(candidates.col(j).norm(), basis.column_scale());
      const double res = basis.residual_norm(candidates.col(j));
      if (scale == 0.0 ||
          res <= tol.relative_tol * scale * basis.dim()) {
        dropped[j] = 1;
        continue;
      }
      if (res > best_norm) {
        best_norm = res;
        best_j = j;
      }
    }
    if (best_j < 0) break;
    dropped[best_j] = 1;
    if (!basis.try_extend(candidates.col(best_j), tol)) continue;
    chosen.push_back(best_j);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

std::vector<int> li_extension(IncrementalBasis& basis,
                              const Eigen::Ref<const MatrixXd>& candidates,
                              int limit, RankTolerance tol) {
  if (candidates.rows() != basis.dim()) {
    throw std::invalid_argument("candidate rows must match basis dimension");
  }
  if (limit < 0) {
    throw std::invalid_argument("limit must be non-negative");
  }
  std::vector<int> chosen;
  for (int j = 0;
       j < candidates.cols() && static_cast<int>(chosen.size()) < limit;
       ++j) {
    if (basis.try_extend(candidates.col(j), tol)) {
      chosen.push_back(j);
    }
  }
  return chosen;
}

ActuatorSchedule controllable_schedule(const LinearSystem& sys, int s, int K,
                                       RankTolerance tol) {
  check_schedule_preconditions(sys, s, K, tol, "B", sys.B());
  const int n = sys.n();
  auto powers = matrix_powers(sys.A(), K);
  IncrementalBasis basis(n);
  std::vector<std::vector<int>> sets(K);
  // Later steps see higher powers of A, so the walk runs backward in time;
  // step K-1-i consumes columns of A^i B.
  for (int i = K - 1; i >= 0 && basis.size() < n; --i) {
    const int limit = std::min(s, n - basis.size());
    MatrixXd candidates = powers[i] * sys.B();
    sets[K - 1 - i] = pivoted_extension(basis, candidates, limit, tol);
  }
  if (basis.size() < n) {
    throw NumericalError("rank accumulation stalled at " +
                         std::to_string(basis.size()) + " of " +
                         std::to_string(n) + " despite valid preconditions");
  }
  ActuatorSchedule schedule(std::move(sets), s);
  if (numerical_rank(controllability_matrix(sys, schedule), tol) < n) {
    throw NumericalError(
        "assembled schedule is numerically rank deficient despite n accepted "
        "columns");
  }
  return schedule;
}

double default_energy_eps(const LinearSystem& sys) {
  const double scale = (sys.B() * sys.B().transpose()).trace();
  if (!(scale > 0.0)) {
    throw std::invalid_argument("B must be nonzero");
  }
  return 1e-6 * sys.n() / scale;
}

ActuatorSchedule energy_aware_controllable_schedule(const LinearSystem& sys,
                                                    int s, int K,
                                                    std::optional<double> eps,
                                                    RankTolerance tol) {
  check_schedule_preconditions(sys, s, K, tol, "B", sys.B());
  const double epsilon = eps.value_or(default_energy_eps(sys));
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("regularization eps must be positive");
  }
  const int n = sys.n();
  const int m = sys.m();
  auto powers = matrix_powers(sys.A(), K);
  IncrementalBasis basis(n);
  std::vector<std::vector<int>> sets(K);

  MatrixXd w = MatrixXd::Zero(n, n);
  MatrixXd m_inv = MatrixXd::Identity(n, n) / epsilon;
  double trace_m_inv = n / epsilon;
  int accepted_since_refresh = 0;

  for (int i = K - 1; i >= 0 && basis.size() < n; --i) {
    MatrixXd candidates = powers[i] * sys.B();
    std::vector<bool> used(m, false);
    const int limit = std::min(s, n - basis.size());
    for (int pick = 0; pick < limit; ++pick) {
      int best_j = -1;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int j = 0; j < m; ++j) {
        if (used[j]) continue;
        const VectorXd c = candidates.col(j);
        const double scale = std::max(c.norm(), basis.column_scale());
        if (scale == 0.0 ||
            basis.residual_norm(c) <= tol.relative_tol * scale * n) {
          continue;
        }
        const double cost = greedy_candidate_cost(m_inv, trace_m_inv, c);
        if (cost < best_cost) {
          best_cost = cost;
          best_j = j;
        }
      }
      if (best_j < 0) break;
      const VectorXd c = candidates.col(best_j);
      if (!basis.try_extend(c, tol)) {
        // Same criterion as the pre-filter, so only rounding jitter lands
        // here; retire the candidate and redo the slot.
        used[best_j] = true;
        --pick;
        continue;
      }
      used[best_j] = true;
      sets[K - 1 - i].push_back(best_j);
      w.noalias() += c * c.transpose();
      const VectorXd t = m_inv * c;
      m_inv.noalias() -= t * t.transpose() / (1.0 + c.dot(t));
      if (++accepted_since_refresh >= 64) {
        MatrixXd reg = w + epsilon * MatrixXd::Identity(n, n);
        m_inv = reg.ldlt().solve(MatrixXd::Identity(n, n));
        m_inv = 0.5 * (m_inv + m_inv.transpose());
        accepted_since_refresh = 0;
      }
      trace_m_inv = m_inv.trace();
    }
  }
  if (basis.size() < n) {
    throw NumericalError("rank accumulation stalled at " +
                         std::to_string(basis.size()) + " of " +
                         std::to_string(n) + " despite valid preconditions");
  }
  ActuatorSchedule schedule(std::move(sets), s);
  if (numerical_rank(controllability_matrix(sys, schedule), tol) < n) {
    throw NumericalError(
        "assembled schedule is numerically rank deficient despite n accepted "
        "columns");
  }
  return schedule;
}

double greedy_candidate_cost(const Eigen::Ref<const MatrixXd>& w_inverse,
                             double trace_w_inverse,
                             const Eigen::Ref<const VectorXd>& column) {
  const VectorXd t = w_inverse * column;
  return trace_w_inverse - t.squaredNorm() / (1.0 + column.dot(t));
}

GreedyScheduleResult rbn_greedy(const LinearSystem& sys, int s, int K,
                                const ActuatorSchedule& initial,
                                RankTolerance tol) {
  const int n = sys.n();
  const int m = sys.m();
  if (s < 1 || s > m) {
    throw std::invalid_argument("sparsity budget must lie in [1, m]");
  }
  if (initial.horizon() != K) {
    throw std::invalid_argument(
        "initial schedule horizon must match the requested horizon");
  }
  if (initial.max_actuator_index() >= m) {
    throw std::invalid_argument(
        "initial schedule references an actuator beyond B");
  }
  for (int k = 0; k < K; ++k) {
    if (static_cast<int>(initial.set_at(k).size()) > s) {
      throw std::invalid_argument(
          "initial schedule exceeds the per-step budget");
    }
  }
  const int initial_rank =
      numerical_rank(controllability_matrix(sys, initial), tol);
  if (initial_rank < n) {
    throw NotControllableError(
        "the initial schedule is not controllable (rank " +
        std::to_string(initial_rank) + " of " + std::to_string(n) + ")");
  }
  MatrixXd w = schedule_gramian(sys, initial);
  MatrixXd w_inv = w.ldlt().solve(MatrixXd::Identity(n, n));
  w_inv = 0.5 * (w_inv + w_inv.transpose());
  double cost = w_inv.trace();

  GreedyScheduleResult result{initial, {cost}};
  std::vector<std::vector<int>> sets = initial.sets();

  // Candidate columns c(k, j) = A^{K-1-k} b_j, grouped per step.
  auto powers = matrix_powers(sys.A(), K);
  std::vector<MatrixXd> step_columns(K);
  for (int k = 0; k < K; ++k) {
    step_columns[k] = powers[K - 1 - k] * sys.B();
  }

  std::vector<IndexPair> pool;
  for (int k = 0; k < K; ++k) {
    if (static_cast<int>(sets[k].size()) >= s) continue;
    for (int j = 0; j < m; ++j) {
      if (!std::binary_search(sets[k].begin(), sets[k].end(), j)) {
        pool.push_back({k, j});
      }
    }
  }

  int accepted_since_refresh = 0;
  while (!pool.empty()) {
    size_t best_index = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (size_t idx = 0; idx < pool.size(); ++idx) {
      const auto& pair = pool[idx];
      const double candidate_cost = greedy_candidate_cost(
          w_inv, cost, step_columns[pair.step].col(pair.actuator));
      if (candidate_cost < best_cost) {
        best_cost = candidate_cost;
        best_index = idx;
      }
    }
    const IndexPair chosen = pool[best_index];
    const VectorXd c = step_columns[chosen.step].col(chosen.actuator);
    w.noalias() += c * c.transpose();
    const VectorXd t = w_inv * c;
    w_inv.noalias() -= t * t.transpose() / (1.0 + c.dot(t));
    if (++accepted_since_refresh >= 64) {
      w_inv = w.ldlt().solve(MatrixXd::Identity(n, n));
      w_inv = 0.5 * (w_inv + w_inv.transpose());
      accepted_since_refresh = 0;
    }
    cost = w_inv.trace();
    result.cost_trace.push_back(cost);

    auto& set = sets[chosen.step];
    set.insert(std::upper_bound(set.begin(), set.end(), chosen.actuator),
               chosen.actuator);
    if (static_cast<int>(set.size()) >= s) {
      std::erase_if(pool, [&](const IndexPair& pair) {
        return pair.step == chosen.step;
      });
    } else {
      pool.erase(pool.begin() + best_index);
    }
  }
  result.schedule = ActuatorSchedule(std::move(sets), s);
  return result;
}

SensorSchedule sensor_schedule(const LinearSystem& sys, int sensor_budget,
                               int horizon, RankTolerance tol) {
  if (!sys.has_output()) {
    throw std::invalid_argument("sensor scheduling needs a measurement matrix");
  }
  const int n = sys.n();
  if (numerical_rank(sys.C(), tol) < n) {
    throw PreconditionError("C must have full column rank n");
  }
  const int s_min = std::max(1, n - numerical_rank(sys.A(), tol));
  if (sensor_budget < s_min) {
    throw PreconditionError(
        "sensor budget " + std::to_string(sensor_budget) +
        " is below max(1, n - rank(A)) = " + std::to_string(s_min));
  }
  const int k_min = (n + sensor_budget - 1) / sensor_budget;
  if (horizon < k_min) {
    throw PreconditionError("horizon " + std::to_string(horizon) +
                            " is below ceil(n/s) = " + std::to_string(k_min));
  }
  // Duality: row selection for (A, C) is column selection for (A^T, C^T).
  // The dual schedule's step k uses power horizon-1-k, so reversing the
  // step order aligns power k with time k in the measurement stack.
  LinearSystem dual(sys.A().transpose(), sys.C().transpose());
  ActuatorSchedule dual_schedule =
      controllable_schedule(dual, sensor_budget, horizon, tol);
  std::vector<std::vector<int>> reversed(horizon);
  for (int k = 0; k < horizon; ++k) {
    reversed[k] = dual_schedule.set_at(horizon - 1 - k);
  }
  return SensorSchedule(std::move(reversed), sensor_budget);
}

MatrixXd selected_observability_matrix(const LinearSystem& sys,
                                       const SensorSchedule& schedule) {
  const int n = sys.n();
  const int p = sys.p();
  int rows = 0;
  for (int k = 0; k < schedule.horizon(); ++k) {
    const auto& set = schedule.set_at(k);
    if (!set.empty() && set.back() >= p) {
      throw std::invalid_argument(
          "schedule references a measurement row beyond C");
    }
    rows += static_cast<int>(set.size());
  }
  MatrixXd stacked(rows, n);
  MatrixXd power = MatrixXd::Identity(n, n);
  int row = 0;
  for (int k = 0; k < schedule.horizon(); ++k) {
    for (int i : schedule.set_at(k)) {
      stacked.row(row++) = sys.C().row(i) * power;
    }
    if (k + 1 < schedule.horizon()) power = sys.A() * power;
  }
  return stacked;
}

VectorXd estimate_x0(const LinearSystem& sys, const SensorSchedule& schedule,
                     const std::vector<VectorXd>& measurements,
                     const std::vector<VectorXd>& applied_inputs,
                     RankTolerance tol) {
  const int horizon = schedule.horizon();
  const int p = sys.p();
  if (static_cast<int>(measurements.size()) != horizon) {
    throw std::invalid_argument(
        "need one measurement vector per scheduled step");
  }
  for (const auto& y : measurements) {
    if (y.size() != p) {
      throw std::invalid_argument("measurement dimension must match C");
    }
  }
  if (!applied_inputs.empty() &&
      static_cast<int>(applied_inputs.size()) < horizon - 1) {
    throw std::invalid_argument(
        "need inputs for every step before the last measurement");
  }
  MatrixXd stacked = selected_observability_matrix(sys, schedule);
  VectorXd rhs(stacked.rows());
  VectorXd forced = VectorXd::Zero(sys.n());
  int row = 0;
  for (int k = 0; k < horizon; ++k) {
    const VectorXd predicted = sys.C() * forced;
    for (int i : schedule.set_at(k)) {
      rhs[row++] = measurements[k][i] - predicted[i];
    }
    if (k + 1 < horizon && !applied_inputs.empty()) {
      if (applied_inputs[k].size() != sys.m()) {
        throw std::invalid_argument("input dimension must match B");
      }
      forced = sys.A() * forced + sys.B() * applied_inputs[k];
    } else if (k + 1 < horizon) {
      forced = sys.A() * forced;
    }
  }
  return min_norm_solve(stacked, rhs, tol);
}

void write_schedule(std::ostream& out, const ActuatorSchedule& schedule) {
  for (int k = 0; k < schedule.horizon(); ++k) {
    const auto& set = schedule.set_at(k);
    for (size_t i = 0; i < set.size(); ++i) {
      if (i > 0) out << ' ';
      out << set[i] + 1;
    }
    out << '\n';
  }
}

std::string schedule_to_string(const ActuatorSchedule& schedule) {
  std::ostringstream out;
  write_schedule(out, schedule);
  return out.str();
}

ActuatorSchedule read_schedule(std::istream& in,
                               std::optional<int> sparsity) {
  std::vector<std::vector<int>> sets;
  std::string line;
  int line_number = 0;
  size_t largest = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream tokens(line);
    std::vector<int> set;
    std::string token;
    while (tokens >> token) {
      int value = 0;
      size_t consumed = 0;
      try {
        value = std::stoi(token, &consumed);
      } catch (const std::exception&) {
        consumed = 0;
      }
      if (consumed != token.size() || value < 1) {
        throw std::invalid_argument(
            "schedule line " + std::to_string(line_number) +
            ": expected 1-based actuator indices, got '" + token + "'");
      }
      set.push_back(value - 1);
    }
    largest = std::max(largest, set.size());
    sets.push_back(std::move(set));
  }
  if (sets.empty()) {
    throw std::invalid_argument("schedule text is empty");
  }
  const int cap = sparsity.value_or(static_cast<int>(largest));
  return ActuatorSchedule(std::move(sets), cap);
}

ActuatorSchedule schedule_from_string(const std::string& text,
                                      std::optional<int> sparsity) {
  std::istringstream in(text);
  return read_schedule(in, sparsity);
}

}  // namespace sparsact
