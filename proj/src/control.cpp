#include "sparsact/control.hpp"

#include <stdexcept>
#include <string>

#include "sparsact/errors.hpp"
#include "sparsact/gramian.hpp"
#include "sparsact/linalg.hpp"
#include "sparsact/rng.hpp"

namespace sparsact {

PiecewiseSparseInput compute_inputs(const LinearSystem& sys,
                                    const ActuatorSchedule& schedule,
                                    const VectorXd& x0, const VectorXd& xf,
                                    RankTolerance tol) {
  const int n = sys.n();
  if (x0.size() != n || xf.size() != n) {
    throw std::invalid_argument("x0 and xf must have dimension n");
  }
  MatrixXd r = controllability_matrix(sys, schedule);
  if (numerical_rank(r, tol) < n) {
    throw NotControllableError(
        "the scheduled controllability matrix is rank deficient");
  }
  const int K = schedule.horizon();
  VectorXd drift = x0;
  for (int k = 0; k < K; ++k) drift = sys.A() * drift;
  VectorXd packed = min_norm_solve(r, xf - drift, tol);

  std::vector<VectorXd> inputs(K, VectorXd::Zero(sys.m()));
  int col = 0;
  for (int k = 0; k < K; ++k) {
    for (int j : schedule.set_at(k)) {
      inputs[k][j] = packed[col++];
    }
  }
  return PiecewiseSparseInput(std::move(inputs), schedule);
}

SimulationResult simulate(const LinearSystem& sys, const VectorXd& x0,
                          const PiecewiseSparseInput& input,
                          const std::optional<NoiseModel>& noise,
                          uint64_t seed) {
  const int n = sys.n();
  if (x0.size() != n) {
    throw std::invalid_argument("x0 must have dimension n");
  }
  if (input.horizon() > 0 && input.inputs()[0].size() != sys.m()) {
    throw std::invalid_argument("input dimension must match B");
  }
  const int p = sys.p();
  MatrixXd v_sqrt, w_sqrt;
  std::mt19937_64 engine = make_engine(seed);
  if (noise) {
    validate_noise_model(*noise, n, p);
    v_sqrt = psd_sqrt(noise->sigma_v);
    if (p > 0) w_sqrt = psd_sqrt(noise->sigma_w);
  }

  SimulationResult result;
  result.states.reserve(input.horizon() + 1);
  result.states.push_back(x0);
  auto measure = [&](const VectorXd& x) {
    if (p == 0) return;
    VectorXd y = sys.C() * x;
    if (noise) y += w_sqrt * gaussian_vector(p, engine);
    result.measurements.push_back(std::move(y));
  };
  measure(x0);
  for (int k = 0; k < input.horizon(); ++k) {
    VectorXd next = sys.A() * result.states.back() + sys.B() * input.inputs()[k];
    if (noise) next += v_sqrt * gaussian_vector(n, engine);
    result.states.push_back(std::move(next));
    measure(result.states.back());
  }
  return result;
}

}  // namespace sparsact
