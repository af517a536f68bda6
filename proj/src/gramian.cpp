#include "sparsact/gramian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "sparsact/errors.hpp"
#include "sparsact/linalg.hpp"

namespace sparsact {

namespace {

void check_actuator_range(const LinearSystem& sys,
                          const ActuatorSchedule& schedule) {
  if (schedule.max_actuator_index() >= sys.m()) {
    throw std::invalid_argument(
        "schedule references an actuator index beyond B");
  }
}

}  // namespace

MatrixXd controllability_matrix(const LinearSystem& sys,
                                const ActuatorSchedule& schedule) {
  check_actuator_range(sys, schedule);
  const int n = sys.n();
  const int total = schedule.total_selected();
  const int K = schedule.horizon();
  MatrixXd r(n, total);
  // Powers descend with k; build blocks back to front so only one running
  // power product is needed.
  MatrixXd power = MatrixXd::Identity(n, n);
  std::vector<int> offsets(K + 1, 0);
  for (int k = 0; k < K; ++k) {
    offsets[k + 1] =
        offsets[k] + static_cast<int>(schedule.set_at(k).size());
  }
  for (int k = K - 1; k >= 0; --k) {
    const auto& set = schedule.set_at(k);
    int col = offsets[k];
    for (int j : set) {
      r.col(col++) = power * sys.B().col(j);
    }
    if (k > 0) power = sys.A() * power;
  }
  return r;
}

MatrixXd full_controllability_matrix(const LinearSystem& sys, int horizon) {
  if (horizon <= 0) {
    throw std::invalid_argument("horizon must be positive");
  }
  const int n = sys.n();
  const int m = sys.m();
  MatrixXd r(n, horizon * m);
  MatrixXd power = MatrixXd::Identity(n, n);
  for (int k = horizon - 1; k >= 0; --k) {
    r.middleCols(k * m, m) = power * sys.B();
    if (k > 0) power = sys.A() * power;
  }
  return r;
}

MatrixXd schedule_gramian(const LinearSystem& sys,
                          const ActuatorSchedule& schedule) {
  check_actuator_range(sys, schedule);
  const int n = sys.n();
  MatrixXd w = MatrixXd::Zero(n, n);
  // W <- A W A^T + B_{S_k} B_{S_k}^T accumulated forward over steps equals
  // the sum of A^{K-1-k} B_{S_k} B_{S_k}^T (A^{K-1-k})^T.
  for (int k = 0; k < schedule.horizon(); ++k) {
    w = sys.A() * w * sys.A().transpose();
    for (int j : schedule.set_at(k)) {
      w.noalias() += sys.B().col(j) * sys.B().col(j).transpose();
    }
  }
  return 0.5 * (w + w.transpose());
}

MatrixXd selection_gramian(const LinearSystem& sys,
                           const SelectionSet& selection) {
  if (selection.num_actuators() != sys.m()) {
    throw std::invalid_argument(
        "selection set actuator count must match B");
  }
  const int n = sys.n();
  const int K = selection.horizon();
  std::vector<MatrixXd> powers(K);
  powers[0] = MatrixXd::Identity(n, n);
  for (int i = 1; i < K; ++i) powers[i] = sys.A() * powers[i - 1];
  MatrixXd w = MatrixXd::Zero(n, n);
  for (const auto& pair : selection.pairs()) {
    VectorXd c = powers[K - 1 - pair.step] * sys.B().col(pair.actuator);
    w.noalias() += c * c.transpose();
  }
  return 0.5 * (w + w.transpose());
}

MatrixXd full_gramian(const LinearSystem& sys, int horizon) {
  if (horizon <= 0) {
    throw std::invalid_argument("horizon must be positive");
  }
  MatrixXd w = MatrixXd::Zero(sys.n(), sys.n());
  for (int k = 0; k < horizon; ++k) {
    w = sys.A() * w * sys.A().transpose();
    w.noalias() += sys.B() * sys.B().transpose();
  }
  return 0.5 * (w + w.transpose());
}

GramianReport report_for_gramian(const MatrixXd& w, RankTolerance tol) {
  if (w.rows() != w.cols()) {
    throw std::invalid_argument("Gramian must be square");
  }
  GramianReport report;
  report.w = 0.5 * (w + w.transpose());
  const int n = static_cast<int>(w.rows());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(report.w);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("eigendecomposition of the Gramian failed");
  }
  const auto& lambda = eig.eigenvalues();
  report.lambda_min = lambda[0];
  report.lambda_max = lambda[n - 1];
  const double threshold =
      tol.relative_tol * std::max(report.lambda_max, 0.0) * n;
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    if (lambda[i] > threshold) ++rank;
  }
  report.rank = rank;
  if (rank == n) {
    double trace_inv = 0.0;
    for (int i = 0; i < n; ++i) trace_inv += 1.0 / lambda[i];
    report.trace_inverse = trace_inv;
  }
  return report;
}

GramianReport gramian(const LinearSystem& sys, const ActuatorSchedule& schedule,
                      RankTolerance tol) {
  return report_for_gramian(schedule_gramian(sys, schedule), tol);
}

double avg_energy(const GramianReport& report) {
  if (!report.trace_inverse) {
    throw NotControllableError(
        "average control energy needs a full-rank Gramian (rank " +
        std::to_string(report.rank) + " of " +
        std::to_string(report.w.rows()) + ")");
  }
  return *report.trace_inverse;
}

double regularized_energy(const Eigen::Ref<const MatrixXd>& w, double eps) {
  if (!(eps > 0.0)) {
    throw std::invalid_argument("regularization eps must be positive");
  }
  if (w.rows() != w.cols()) {
    throw std::invalid_argument("Gramian must be square");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (w + w.transpose()),
                                              Eigen::EigenvaluesOnly);
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    total += 1.0 / (std::max(eig.eigenvalues()[i], 0.0) + eps);
  }
  return total;
}

double alpha_lower_bound(const GramianReport& initial,
                         const GramianReport& full) {
  if (initial.rank != initial.w.rows()) {
    throw NotControllableError(
        "supermodularity ratio needs a full-rank initial Gramian");
  }
  if (full.lambda_max <= 0.0) {
    throw std::invalid_argument("full Gramian must be nonzero");
  }
  return initial.lambda_min / full.lambda_max;
}

double theorem2_bound(double trace_inv_initial, double optimal_cost,
                      double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("alpha must be positive");
  }
  if (optimal_cost > trace_inv_initial) {
    throw std::invalid_argument(
        "optimal cost cannot exceed the initial cost");
  }
  const double beta = std::min(alpha / 2.0, alpha / (1.0 + alpha));
  return (1.0 - beta) * trace_inv_initial + beta * optimal_cost;
}

SparseControllabilityResult sparse_controllability_check(
    const LinearSystem& sys, int s, RankTolerance tol) {
  if (s < 0 || s > sys.m()) {
    throw std::invalid_argument(
        "sparsity budget must lie in [0, number of actuators]");
  }
  SparseControllabilityResult result;
  if (s == 0) {
    result.feasible = false;
    result.reason = "sparsity budget is zero";
    return result;
  }
  const int n = sys.n();
  const int rank_a = numerical_rank(sys.A(), tol);
  const int classical_rank =
      numerical_rank(full_controllability_matrix(sys, n), tol);
  if (classical_rank < n) {
    result.feasible = false;
    result.reason = "the pair (A, B) is not controllable (rank " +
                    std::to_string(classical_rank) + " of " +
                    std::to_string(n) + ")";
    return result;
  }
  if (s < n - rank_a) {
    result.feasible = false;
    result.reason = "sparsity " + std::to_string(s) +
                    " is below n - rank(A) = " + std::to_string(n - rank_a);
    return result;
  }
  result.feasible = true;
  result.k_lower = (n + s - 1) / s;
  const int q = minimal_polynomial_degree(sys.A(), tol);
  const int rank_b = numerical_rank(sys.B(), tol);
  result.k_upper = q * ((rank_b + s - 1) / s);
  // The n - s + 1 cap presumes the budget fits inside the state dimension.
  if (s <= n) result.k_upper = std::min(result.k_upper, n - s + 1);
  return result;
}

}  // namespace sparsact
