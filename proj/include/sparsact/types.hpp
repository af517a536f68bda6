#pragma once

#include <Eigen/Core>
#include <compare>
#include <optional>
#include <set>
#include <vector>

namespace sparsact {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Relative threshold used by every rank / pseudo-inverse decision in the
// library. A singular value (or eigenvalue magnitude) counts as nonzero when
// it exceeds relative_tol * largest * max(rows, cols).
struct RankTolerance {
  double relative_tol = 1e-10;
};

// Discrete-time linear dynamics x(k+1) = A x(k) + B u(k), optionally with a
// measurement map y(k) = C x(k).
class LinearSystem {
public:
  LinearSystem(MatrixXd a, MatrixXd b);
  LinearSystem(MatrixXd a, MatrixXd b, MatrixXd c);

  const MatrixXd& A() const { return a_; }
  const MatrixXd& B() const { return b_; }
  // Valid only when has_output() is true.
  const MatrixXd& C() const;

  bool has_output() const { return c_.has_value(); }

  int n() const { return static_cast<int>(a_.rows()); }
  int m() const { return static_cast<int>(b_.cols()); }
  // Number of measured outputs; 0 when no C was given.
  int p() const { return c_ ? static_cast<int>(c_->rows()) : 0; }

private:
  MatrixXd a_;
  MatrixXd b_;
  std::optional<MatrixXd> c_;
};

// One scheduled (time step, actuator) pair, both 0-based.
struct IndexPair {
  int step = 0;
  int actuator = 0;

  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

// A set of (step, actuator) pairs over a fixed horizon. This is the
// set-function view of a schedule: no per-step cardinality cap is enforced,
// only index ranges and uniqueness.
class SelectionSet {
public:
  SelectionSet(int horizon, int num_actuators);

  // Returns false when the pair was already present.
  bool insert(IndexPair pair);
  bool contains(IndexPair pair) const { return pairs_.count(pair) > 0; }

  int horizon() const { return horizon_; }
  int num_actuators() const { return num_actuators_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  int count_at(int step) const;

  const std::set<IndexPair>& pairs() const { return pairs_; }

  // Set union; both operands must share horizon and actuator count.
  SelectionSet united_with(const SelectionSet& other) const;

private:
  int horizon_;
  int num_actuators_;
  std::set<IndexPair> pairs_;
};

// Per-step actuator support sets S_0, ..., S_{K-1} with |S_k| <= sparsity.
// Actuator indices are 0-based, kept sorted and unique.
class ActuatorSchedule {
public:
  ActuatorSchedule(std::vector<std::vector<int>> sets, int sparsity);

  static ActuatorSchedule from_selection(const SelectionSet& selection,
                                         int sparsity);
  SelectionSet to_selection(int num_actuators) const;

  int horizon() const { return static_cast<int>(sets_.size()); }
  int sparsity() const { return sparsity_; }
  const std::vector<int>& set_at(int step) const { return sets_.at(step); }
  const std::vector<std::vector<int>>& sets() const { return sets_; }

  int total_selected() const;
  int max_actuator_index() const;

  friend bool operator==(const ActuatorSchedule&,
                         const ActuatorSchedule&) = default;

private:
  std::vector<std::vector<int>> sets_;
  int sparsity_;
};

// Sensor counterpart of ActuatorSchedule: per-step measured-row sets with
// |S_k| <= budget.
class SensorSchedule {
public:
  SensorSchedule(std::vector<std::vector<int>> sets, int budget);

  int horizon() const { return static_cast<int>(sets_.size()); }
  int budget() const { return budget_; }
  const std::vector<int>& set_at(int step) const { return sets_.at(step); }
  const std::vector<std::vector<int>>& sets() const { return sets_; }

  int total_selected() const;

private:
  std::vector<std::vector<int>> sets_;
  int budget_;
};

// Input sequence u(0), ..., u(K-1) whose support at step k lies inside the
// schedule's S_k.
class PiecewiseSparseInput {
public:
  PiecewiseSparseInput(std::vector<VectorXd> inputs, ActuatorSchedule schedule);

  const std::vector<VectorXd>& inputs() const { return inputs_; }
  const ActuatorSchedule& schedule() const { return schedule_; }
  int horizon() const { return static_cast<int>(inputs_.size()); }

private:
  std::vector<VectorXd> inputs_;
  ActuatorSchedule schedule_;
};

// Process / measurement noise covariances. Both must be symmetric PSD;
// sigma_w may be empty (0x0) for systems without measurements.
struct NoiseModel {
  MatrixXd sigma_v;
  MatrixXd sigma_w;
};

// Validates symmetry (within 1e-12 relative) and positive semidefiniteness
// (eigenvalues >= -1e-12 * scale); throws std::invalid_argument otherwise.
void validate_covariance(const MatrixXd& sigma, const char* name);
void validate_noise_model(const NoiseModel& noise, int n, int p);

}  // namespace sparsact
