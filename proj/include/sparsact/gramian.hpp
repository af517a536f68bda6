#pragma once

#include <optional>
#include <string>

#include "sparsact/types.hpp"

namespace sparsact {

// Columns A^{K-1} B_{S_0} | A^{K-2} B_{S_1} | ... | B_{S_{K-1}}, steps in
// ascending order, actuator indices ascending within each step. n x total.
MatrixXd controllability_matrix(const LinearSystem& sys,
                                const ActuatorSchedule& schedule);

// Classical K-step matrix [A^{K-1}B ... AB B] with every actuator available.
MatrixXd full_controllability_matrix(const LinearSystem& sys, int horizon);

// sum over selected pairs (k, j) of c c^T with c = A^{K-1-k} B_j.
MatrixXd schedule_gramian(const LinearSystem& sys,
                          const ActuatorSchedule& schedule);
MatrixXd selection_gramian(const LinearSystem& sys,
                           const SelectionSet& selection);
MatrixXd full_gramian(const LinearSystem& sys, int horizon);

struct GramianReport {
  MatrixXd w;
  int rank = 0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  // Present only when rank == n.
  std::optional<double> trace_inverse;
};

GramianReport gramian(const LinearSystem& sys, const ActuatorSchedule& schedule,
                      RankTolerance tol = {});
GramianReport report_for_gramian(const MatrixXd& w, RankTolerance tol = {});

// trace(W^-1); requires a full-rank report, else NotControllableError.
double avg_energy(const GramianReport& report);

// trace((W + eps I)^-1) = sum_i 1/(lambda_i + eps) + (n - rank)/eps.
double regularized_energy(const Eigen::Ref<const MatrixXd>& w, double eps);

// lambda_min(W_initial) / lambda_max(W_full); the supermodularity ratio
// lower bound. Requires the initial Gramian to be full rank.
double alpha_lower_bound(const GramianReport& initial,
                         const GramianReport& full);

// (1 - beta) trace_inv_initial + beta optimal_cost with
// beta = min(alpha/2, alpha/(1+alpha)).
double theorem2_bound(double trace_inv_initial, double optimal_cost,
                      double alpha);

struct SparseControllabilityResult {
  bool feasible = false;
  // Valid only when feasible: the horizon range within which a sparsity-
  // constrained controllable schedule is guaranteed to exist.
  int k_lower = 0;
  int k_upper = 0;
  std::string reason;  // nonempty when infeasible
};

// Feasibility of s-sparse control: (A, B) controllable and
// s >= max(1, n - rank(A)). Horizon bounds ceil(n/s) <= K <=
// min(q ceil(rank(B)/s), n - s + 1) with q the minimal polynomial degree.
SparseControllabilityResult sparse_controllability_check(
    const LinearSystem& sys, int s, RankTolerance tol = {});

}  // namespace sparsact
