#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sparsact/types.hpp"

namespace sparsact {

struct KalmanState {
  VectorXd x_hat;
  MatrixXd p;
};

// One predict/update cycle. The previous input enters both the state
// prediction and the predicted measurement, so the innovation is
// y - C (A x_hat + B u_prev). Throws NumericalError when the innovation
// covariance is singular at the shared rank threshold.
KalmanState kalman_step(const LinearSystem& sys, const KalmanState& state,
                        const VectorXd& u_prev, const VectorXd& y,
                        const NoiseModel& noise, RankTolerance tol = {});

struct SteadyStateCovariance {
  MatrixXd p;  // posterior estimation-error covariance fixed point
  MatrixXd s;  // prior covariance A P A^T + sigma_v
  double residual = 0.0;
  int iterations = 0;
  // (A, sigma_v^{1/2}) controllable and (A, C) observable; callers should
  // warn when false since the fixed point may then be non-unique.
  bool hypotheses_hold = true;
};

// Fixed-point iteration of P = S - S C^T (C S C^T + sigma_w)^-1 C S with
// S = A P A^T + sigma_v, from P = sigma_v, until the relative Frobenius
// update drops below 1e-10 (capped at 1e5 sweeps, NumericalError beyond).
SteadyStateCovariance steady_state_covariance(const LinearSystem& sys,
                                              const NoiseModel& noise,
                                              RankTolerance tol = {});

struct MseBoundInputs {
  MatrixXd a;
  double xi = 0.0;    // residual decay factor of the dictionary
  int s = 0;          // per-step sparsity budget
  MatrixXd p;         // steady-state posterior covariance
  MatrixXd sigma_v;
  VectorXd xf;
  // Residual energy left by the pursuit at the target; defaults to 5% of the
  // noise-and-drift terms when absent.
  std::optional<double> eta;
};

// Steady-state tracking-error bound
//   eta + 2 xi^s ||(A - I) xf||^2 / (1 - chi)
//       + (tr sigma_v + (1 + 3 xi^s) tr(A P A^T)) / (1 - chi)
// with chi = 2 xi^s ||A||^2. Defined only when chi < 1; otherwise throws
// BoundUndefinedError carrying the smallest sparsity that restores chi < 1.
double mse_upper_bound(const MseBoundInputs& inputs);

// Noise floor tr(sigma_v) + tr(A P A^T): the error power no input choice can
// remove once the estimate is steady.
double mse_floor(const LinearSystem& sys, const NoiseModel& noise,
                 const MatrixXd& p);

struct Regularizers {
  MatrixXd q;  // state weight, symmetric PSD
  MatrixXd r;  // input weight, symmetric PD
};

struct TrackingOptions {
  // Initial state; zero when empty. The filter starts from it exactly.
  VectorXd x0;
  // Switches the per-step pursuit to dictionary B^T Q B + R and target
  // B^T Q (xf - A x_hat).
  std::optional<Regularizers> regularizers;
  // Residual decay factor used to evaluate the error bound; when absent the
  // bound field stays empty.
  std::optional<double> xi;
  double omp_tol = 1e-12;
};

struct TrackingRun {
  VectorXd mse_per_step;  // mean over trials of ||x(k+1) - xf||^2
  double steady_mse = 0.0;
  double steady_mse_se = 0.0;  // standard error over trials
  std::vector<double> per_trial_steady_mse;
  int steady_window = 0;  // trailing steps averaged into steady_mse

  // First-trial trajectories for inspection.
  std::vector<VectorXd> states;     // x(0) .. x(horizon)
  std::vector<VectorXd> estimates;  // x_hat(0) .. x_hat(horizon)
  std::vector<VectorXd> inputs;     // u(0) .. u(horizon-1)

  std::optional<double> floor;
  std::optional<double> bound;
  bool bound_condition_holds = false;
};

// Closed-loop sparse tracking: at each step an orthogonal pursuit picks at
// most `sparsity` actuators toward xf from the current estimate, the plant
// moves under process noise, and a Kalman step absorbs the noisy
// measurement (C defaults to identity when the system has none). Runs
// `trials` independent seeded repetitions and averages.
TrackingRun track(const LinearSystem& sys, const NoiseModel& noise,
                  const VectorXd& xf, int sparsity, int horizon, int trials,
                  uint64_t seed, const TrackingOptions& options = {});

// CSV with columns step,mse,mse_db,bound,floor (decibels are 10 log10).
// metadata_lines are emitted first, one '#' line each.
void write_tracking_csv(std::ostream& out, const TrackingRun& run,
                        const std::vector<std::string>& metadata_lines = {});

}  // namespace sparsact
