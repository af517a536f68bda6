#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparsact/types.hpp"

namespace sparsact {

// Minimum-norm inputs steering x(0) = x0 to x(K) = xf under the schedule's
// per-step supports. Throws NotControllableError when the scheduled
// controllability matrix is rank deficient.
PiecewiseSparseInput compute_inputs(const LinearSystem& sys,
                                    const ActuatorSchedule& schedule,
                                    const VectorXd& x0, const VectorXd& xf,
                                    RankTolerance tol = {});

struct SimulationResult {
  std::vector<VectorXd> states;        // x(0), ..., x(K)
  std::vector<VectorXd> measurements;  // y(0), ..., y(K); empty without C
};

// Rolls the dynamics forward. With a noise model, process noise enters every
// transition and measurement noise every output; the seed makes runs
// reproducible.
SimulationResult simulate(const LinearSystem& sys, const VectorXd& x0,
                          const PiecewiseSparseInput& input,
                          const std::optional<NoiseModel>& noise = {},
                          uint64_t seed = 0);

}  // namespace sparsact
