#include "sparsact/types.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

namespace sparsact {

namespace {

void check_finite(const MatrixXd& m, const char* name) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(name) +
                                " contains non-finite entries");
  }
}

std::vector<std::vector<int>> normalize_sets(
    std::vector<std::vector<int>> sets, int sparsity, const char* what) {
  if (sparsity < 0) {
    throw std::invalid_argument(std::string(what) +
                                ": sparsity budget must be non-negative");
  }
  for (auto& set : sets) {
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (!set.empty() && set.front() < 0) {
      throw std::invalid_argument(std::string(what) +
                                  ": negative index in a step set");
    }
    if (static_cast<int>(set.size()) > sparsity) {
      throw std::invalid_argument(
          std::string(what) + ": a step selects " +
          std::to_string(set.size()) + " indices, budget is " +
          std::to_string(sparsity));
    }
  }
  return sets;
}

}  // namespace

LinearSystem::LinearSystem(MatrixXd a, MatrixXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols()) {
    throw std::invalid_argument("A must be square");
  }
  if (b_.rows() != a_.rows()) {
    throw std::invalid_argument("B must have as many rows as A");
  }
  if (a_.rows() == 0 || b_.cols() == 0) {
    throw std::invalid_argument("system dimensions must be positive");
  }
  check_finite(a_, "A");
  check_finite(b_, "B");
}

LinearSystem::LinearSystem(MatrixXd a, MatrixXd b, MatrixXd c)
    : LinearSystem(std::move(a), std::move(b)) {
  if (c.cols() != a_.rows()) {
    throw std::invalid_argument("C must have as many columns as A has rows");
  }
  if (c.rows() == 0) {
    throw std::invalid_argument("C must have at least one row");
  }
  check_finite(c, "C");
  c_ = std::move(c);
}

const MatrixXd& LinearSystem::C() const {
  if (!c_) {
    throw std::logic_error("system has no measurement matrix");
  }
  return *c_;
}

SelectionSet::SelectionSet(int horizon, int num_actuators)
    : horizon_(horizon), num_actuators_(num_actuators) {
  if (horizon <= 0 || num_actuators <= 0) {
    throw std::invalid_argument(
        "selection set needs positive horizon and actuator count");
  }
}

bool SelectionSet::insert(IndexPair pair) {
  if (pair.step < 0 || pair.step >= horizon_ || pair.actuator < 0 ||
      pair.actuator >= num_actuators_) {
    throw std::invalid_argument("selection pair out of range");
  }
  return pairs_.insert(pair).second;
}

int SelectionSet::count_at(int step) const {
  int count = 0;
  for (const auto& pair : pairs_) {
    if (pair.step == step) ++count;
  }
  return count;
}

SelectionSet SelectionSet::united_with(const SelectionSet& other) const {
  if (other.horizon_ != horizon_ || other.num_actuators_ != num_actuators_) {
    throw std::invalid_argument("selection sets have mismatched shapes");
  }
  SelectionSet result(*this);
  result.pairs_.insert(other.pairs_.begin(), other.pairs_.end());
  return result;
}

ActuatorSchedule::ActuatorSchedule(std::vector<std::vector<int>> sets,
                                   int sparsity)
    : sets_(normalize_sets(std::move(sets), sparsity, "actuator schedule")),
      sparsity_(sparsity) {
  if (sets_.empty()) {
    throw std::invalid_argument("actuator schedule needs at least one step");
  }
}

ActuatorSchedule ActuatorSchedule::from_selection(const SelectionSet& selection,
                                                 int sparsity) {
  std::vector<std::vector<int>> sets(selection.horizon());
  for (const auto& pair : selection.pairs()) {
    sets[pair.step].push_back(pair.actuator);
  }
  return ActuatorSchedule(std::move(sets), sparsity);
}

SelectionSet ActuatorSchedule::to_selection(int num_actuators) const {
  SelectionSet selection(horizon(), num_actuators);
  for (int k = 0; k < horizon(); ++k) {
    for (int j : sets_[k]) {
      selection.insert({k, j});
    }
  }
  return selection;
}

int ActuatorSchedule::total_selected() const {
  int total = 0;
  for (const auto& set : sets_) total += static_cast<int>(set.size());
  return total;
}

int ActuatorSchedule::max_actuator_index() const {
  int max_index = -1;
  for (const auto& set : sets_) {
    if (!set.empty()) max_index = std::max(max_index, set.back());
  }
  return max_index;
}

SensorSchedule::SensorSchedule(std::vector<std::vector<int>> sets, int budget)
    : sets_(normalize_sets(std::move(sets), budget, "sensor schedule")),
      budget_(budget) {
  if (sets_.empty()) {
    throw std::invalid_argument("sensor schedule needs at least one step");
  }
}

int SensorSchedule::total_selected() const {
  int total = 0;
  for (const auto& set : sets_) total += static_cast<int>(set.size());
  return total;
}

PiecewiseSparseInput::PiecewiseSparseInput(std::vector<VectorXd> inputs,
                                           ActuatorSchedule schedule)
    : inputs_(std::move(inputs)), schedule_(std::move(schedule)) {
  if (static_cast<int>(inputs_.size()) != schedule_.horizon()) {
    throw std::invalid_argument(
        "input sequence length must match the schedule horizon");
  }
  for (int k = 0; k < schedule_.horizon(); ++k) {
    const auto& u = inputs_[k];
    const auto& set = schedule_.set_at(k);
    auto it = set.begin();
    for (int j = 0; j < u.size(); ++j) {
      const bool scheduled = (it != set.end() && *it == j);
      if (scheduled) {
        ++it;
      } else if (u[j] != 0.0) {
        throw std::invalid_argument(
            "input at step " + std::to_string(k) +
            " is nonzero outside the scheduled support");
      }
    }
  }
}

void validate_covariance(const MatrixXd& sigma, const char* name) {
  if (sigma.rows() != sigma.cols()) {
    throw std::invalid_argument(std::string(name) + " must be square");
  }
  check_finite(sigma, name);
  if (sigma.rows() == 0) return;
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma,
                                              Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw std::invalid_argument(std::string(name) +
                                " must be positive semidefinite");
  }
}

void validate_noise_model(const NoiseModel& noise, int n, int p) {
  validate_covariance(noise.sigma_v, "sigma_v");
  if (noise.sigma_v.rows() != n) {
    throw std::invalid_argument("sigma_v must be n x n");
  }
  if (p > 0) {
    validate_covariance(noise.sigma_w, "sigma_w");
    if (noise.sigma_w.rows() != p) {
      throw std::invalid_argument("sigma_w must match the output dimension");
    }
  }
}

}  // namespace sparsact
