#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "sparsact/linalg.hpp"
#include "sparsact/types.hpp"

namespace sparsact {

// Greedily extends basis with linearly independent columns of candidates,
// scanned in ascending index order, stopping after limit acceptances.
// Returns the accepted column indices; basis grows as a side effect.
std::vector<int> li_extension(IncrementalBasis& basis,
                              const Eigen::Ref<const MatrixXd>& candidates,
                              int limit, RankTolerance tol = {});

// Backward rank-accumulation schedule: walks i = K-1 .. 0 collecting up to s
// linearly independent columns of A^i B per step until n columns are held.
// Guaranteed to reach rank n when rank(B) = n, s >= max(1, n - rank(A)) and
// K >= ceil(n/s); those preconditions are checked and named on failure.
// Exactly n pairs end up selected.
ActuatorSchedule controllable_schedule(const LinearSystem& sys, int s, int K,
                                       RankTolerance tol = {});

// Same skeleton, but within each step the independent columns are picked one
// by one to minimize trace((W + eps I)^-1) over the columns accepted so far.
// eps defaults to 1e-6 * n / trace(B B^T).
ActuatorSchedule energy_aware_controllable_schedule(
    const LinearSystem& sys, int s, int K, std::optional<double> eps = {},
    RankTolerance tol = {});

double default_energy_eps(const LinearSystem& sys);

struct GreedyScheduleResult {
  ActuatorSchedule schedule;
  // trace(W^-1) before any greedy addition and after each one; monotone
  // non-increasing.
  std::vector<double> cost_trace;
};

// Greedy trace(W^-1) minimization seeded by a controllable initial schedule:
// repeatedly adds the (step, actuator) pair with the lowest post-addition
// cost, dropping saturated steps from the candidate pool, until every step
// holds s actuators. Ties break toward the lexicographically smallest pair.
GreedyScheduleResult rbn_greedy(const LinearSystem& sys, int s, int K,
                                const ActuatorSchedule& initial,
                                RankTolerance tol = {});

// trace((W + c c^T)^-1) via the rank-one update
// trace(W^-1) - ||W^-1 c||^2 / (1 + c^T W^-1 c).
double greedy_candidate_cost(const Eigen::Ref<const MatrixXd>& w_inverse,
                             double trace_w_inverse,
                             const Eigen::Ref<const VectorXd>& column);

// Sensor-side counterpart obtained by scheduling the transposed system and
// reversing the step order, so the stacked selected-row observability matrix
// has rank n. Requires rank(C) = n.
SensorSchedule sensor_schedule(const LinearSystem& sys, int sensor_budget,
                               int horizon, RankTolerance tol = {});

// Rows C_{S_k} A^k stacked for k = 0 .. horizon-1.
MatrixXd selected_observability_matrix(const LinearSystem& sys,
                                       const SensorSchedule& schedule);

// Minimum-norm initial-state estimate from the scheduled measurement rows.
// measurements holds full y(k) vectors for k = 0 .. horizon-1; the schedule
// picks the rows used. applied_inputs may be empty (treated as zero) or hold
// at least horizon-1 input vectors whose forced response is subtracted.
VectorXd estimate_x0(const LinearSystem& sys, const SensorSchedule& schedule,
                     const std::vector<VectorXd>& measurements,
                     const std::vector<VectorXd>& applied_inputs = {},
                     RankTolerance tol = {});

// Line-oriented text form: line k lists the 1-based actuator indices of S_k
// separated by single spaces; an empty line is an empty set.
void write_schedule(std::ostream& out, const ActuatorSchedule& schedule);
std::string schedule_to_string(const ActuatorSchedule& schedule);

// Reads the text form back. The sparsity of the result is the largest set
// size unless a larger cap is supplied.
ActuatorSchedule read_schedule(std::istream& in,
                               std::optional<int> sparsity = {});
ActuatorSchedule schedule_from_string(const std::string& text,
                                      std::optional<int> sparsity = {});

}  // namespace sparsact
