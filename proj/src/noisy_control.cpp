#include "sparsact/noisy_control.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sparsact/errors.hpp"
#include "sparsact/gramian.hpp"
#include "sparsact/linalg.hpp"
#include "sparsact/rng.hpp"
#include "sparsact/sparse_recovery.hpp"

namespace sparsact {

namespace {

std::string format_number(double value) {
  if (!std::isfinite(value)) return "";
  std::ostringstream out;
  out << std::setprecision(12) << value;
  return out.str();
}

void require_spd_innovation(const MatrixXd& s, RankTolerance tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s, Eigen::EigenvaluesOnly);
  const double largest = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  if (eig.eigenvalues().minCoeff() <=
      tol.relative_tol * largest * s.rows()) {
    throw NumericalError("innovation covariance is numerically singular");
  }
}

}  // namespace

KalmanState kalman_step(const LinearSystem& sys, const KalmanState& state,
                        const VectorXd& u_prev, const VectorXd& y,
                        const NoiseModel& noise, RankTolerance tol) {
  if (!sys.has_output()) {
    throw std::invalid_argument("Kalman update needs a measurement matrix");
  }
  const int n = sys.n();
  const int p = sys.p();
  if (state.x_hat.size() != n || state.p.rows() != n || state.p.cols() != n) {
    throw std::invalid_argument("filter state has wrong dimensions");
  }
  if (u_prev.size() != sys.m() || y.size() != p) {
    throw std::invalid_argument("input or measurement dimension mismatch");
  }
  validate_noise_model(noise, n, p);
  const MatrixXd& a = sys.A();
  const MatrixXd& c = sys.C();

  MatrixXd p_prior = a * state.p * a.transpose() + noise.sigma_v;
  p_prior = 0.5 * (p_prior + p_prior.transpose());
  MatrixXd innovation_cov = c * p_prior * c.transpose() + noise.sigma_w;
  innovation_cov = 0.5 * (innovation_cov + innovation_cov.transpose());
  require_spd_innovation(innovation_cov, tol);

  // gain^T = S^-1 C P, i.e. gain = P C^T S^-1.
  MatrixXd gain =
      innovation_cov.ldlt().solve(c * p_prior).transpose();

  const VectorXd predicted = a * state.x_hat + sys.B() * u_prev;
  KalmanState next;
  next.x_hat = predicted + gain * (y - c * predicted);
  next.p = (MatrixXd::Identity(n, n) - gain * c) * p_prior;
  next.p = 0.5 * (next.p + next.p.transpose());
  return next;
}

SteadyStateCovariance steady_state_covariance(const LinearSystem& sys,
                                              const NoiseModel& noise,
                                              RankTolerance tol) {
  if (!sys.has_output()) {
    throw std::invalid_argument(
        "steady-state covariance needs a measurement matrix");
  }
  const int n = sys.n();
  const int p = sys.p();
  validate_noise_model(noise, n, p);
  const MatrixXd& a = sys.A();
  const MatrixXd& c = sys.C();

  SteadyStateCovariance result;
  const MatrixXd v_sqrt = psd_sqrt(noise.sigma_v);
  const bool controllable =
      v_sqrt.norm() > 0.0 &&
      numerical_rank(full_controllability_matrix(LinearSystem(a, v_sqrt), n),
                     tol) == n;
  const bool observable =
      numerical_rank(
          full_controllability_matrix(
              LinearSystem(a.transpose(), c.transpose()), n),
          tol) == n;
  result.hypotheses_hold = controllable && observable;

  auto prior_of = [&](const MatrixXd& posterior) {
    MatrixXd s = a * posterior * a.transpose() + noise.sigma_v;
    return MatrixXd(0.5 * (s + s.transpose()));
  };
  auto sweep = [&](const MatrixXd& posterior) {
    const MatrixXd s = prior_of(posterior);
    MatrixXd t = c * s * c.transpose() + noise.sigma_w;
    t = 0.5 * (t + t.transpose());
    require_spd_innovation(t, tol);
    const MatrixXd cs = c * s;
    MatrixXd p_next = s - cs.transpose() * t.ldlt().solve(cs);
    return MatrixXd(0.5 * (p_next + p_next.transpose()));
  };

  MatrixXd p_current = noise.sigma_v;
  const int max_iterations = 100000;
  for (int iter = 1; iter <= max_iterations; ++iter) {
    const MatrixXd p_next = sweep(p_current);
    const double change = (p_next - p_current).norm();
    p_current = p_next;
    result.iterations = iter;
    if (change <= 1e-10 * (1.0 + p_next.norm())) {
      result.p = p_current;
      result.s = prior_of(p_current);
      result.residual = (p_current - sweep(p_current)).norm();
      return result;
    }
  }
  throw NumericalError(
      "covariance fixed point did not converge in 100000 sweeps "
      "(residual " +
      std::to_string((p_current - sweep(p_current)).norm()) + ")");
}

double mse_upper_bound(const MseBoundInputs& inputs) {
  const int n = static_cast<int>(inputs.a.rows());
  if (inputs.a.cols() != n || n == 0) {
    throw std::invalid_argument("A must be square");
  }
  if (inputs.p.rows() != n || inputs.p.cols() != n ||
      inputs.sigma_v.rows() != n || inputs.sigma_v.cols() != n ||
      inputs.xf.size() != n) {
    throw std::invalid_argument("bound inputs have mismatched dimensions");
  }
  if (inputs.xi < 0.0 || inputs.xi > 1.0) {
    throw std::invalid_argument("decay factor must lie in [0, 1]");
  }
  if (inputs.s < 0) {
    throw std::invalid_argument("sparsity must be non-negative");
  }
  if (inputs.eta && *inputs.eta < 0.0) {
    throw std::invalid_argument("eta must be non-negative");
  }
  const double a_norm = spectral_norm(inputs.a);
  const double decay = std::pow(inputs.xi, inputs.s);
  const double chi = 2.0 * decay * a_norm * a_norm;
  if (!(chi < 1.0)) {
    int required = -1;
    if (inputs.xi == 0.0) {
      required = 1;
    } else if (inputs.xi < 1.0) {
      // Smallest s with 2 xi^s ||A||^2 < 1.
      const double threshold = 1.0 / (2.0 * a_norm * a_norm);
      int candidate = static_cast<int>(
                          std::floor(std::log(threshold) /
                                     std::log(inputs.xi))) +
                      1;
      candidate = std::max(candidate, 0);
      while (2.0 * std::pow(inputs.xi, candidate) * a_norm * a_norm >= 1.0) {
        ++candidate;
      }
      required = candidate;
    }
    throw BoundUndefinedError(
        "error bound undefined: 2 xi^s ||A||^2 = " + std::to_string(chi) +
        " >= 1",
        required);
  }
  const double denom = 1.0 - chi;
  const VectorXd drift = (inputs.a - MatrixXd::Identity(n, n)) * inputs.xf;
  const double drift_term = 2.0 * decay * drift.squaredNorm() / denom;
  const double tr_apat =
      (inputs.a * inputs.p * inputs.a.transpose()).trace();
  const double noise_term =
      (inputs.sigma_v.trace() + (1.0 + 3.0 * decay) * tr_apat) / denom;
  const double eta = inputs.eta.value_or(0.05 * (drift_term + noise_term));
  return eta + drift_term + noise_term;
}

double mse_floor(const LinearSystem& sys, const NoiseModel& noise,
                 const MatrixXd& p) {
  const int n = sys.n();
  if (p.rows() != n || p.cols() != n) {
    throw std::invalid_argument("covariance must be n x n");
  }
  if (noise.sigma_v.rows() != n || noise.sigma_v.cols() != n) {
    throw std::invalid_argument("sigma_v must be n x n");
  }
  return noise.sigma_v.trace() +
         (sys.A() * p * sys.A().transpose()).trace();
}

TrackingRun track(const LinearSystem& sys, const NoiseModel& noise,
                  const VectorXd& xf, int sparsity, int horizon, int trials,
                  uint64_t seed, const TrackingOptions& options) {
  const int n = sys.n();
  const int m = sys.m();
  if (xf.size() != n) {
    throw std::invalid_argument("target state must have dimension n");
  }
  if (sparsity < 1 || sparsity > m) {
    throw std::invalid_argument("sparsity must lie in [1, m]");
  }
  if (horizon < 1 || trials < 1) {
    throw std::invalid_argument("horizon and trials must be positive");
  }
  VectorXd x0 = options.x0;
  if (x0.size() == 0) {
    x0 = VectorXd::Zero(n);
  } else if (x0.size() != n) {
    throw std::invalid_argument("initial state must have dimension n");
  }

  // Measurements default to the full state when the system carries no C.
  LinearSystem observed =
      sys.has_output()
          ? sys
          : LinearSystem(sys.A(), sys.B(), MatrixXd::Identity(n, n));
  const int p = observed.p();
  validate_noise_model(noise, n, p);

  MatrixXd dictionary = observed.B();
  MatrixXd target_map = MatrixXd::Identity(n, n);
  bool project_target = false;
  if (options.regularizers) {
    const auto& reg = *options.regularizers;
    validate_covariance(reg.q, "Q");
    if (reg.q.rows() != n) {
      throw std::invalid_argument("Q must be n x n");
    }
    validate_covariance(reg.r, "R");
    if (reg.r.rows() != m) {
      throw std::invalid_argument("R must be m x m");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(reg.r,
                                                Eigen::EigenvaluesOnly);
    const double largest = std::max(eig.eigenvalues().maxCoeff(), 0.0);
    if (eig.eigenvalues().minCoeff() <= 1e-12 * std::max(largest, 1.0)) {
      throw std::invalid_argument("input weight R must be positive definite");
    }
    dictionary = observed.B().transpose() * reg.q * observed.B() + reg.r;
    dictionary = 0.5 * (dictionary + dictionary.transpose());
    target_map = observed.B().transpose() * reg.q;
    project_target = true;
  }

  const MatrixXd v_sqrt = psd_sqrt(noise.sigma_v);
  const MatrixXd w_sqrt = psd_sqrt(noise.sigma_w);
  const int window = std::max(1, (horizon + 3) / 4);

  TrackingRun run;
  run.mse_per_step = VectorXd::Zero(horizon);
  run.steady_window = window;
  run.per_trial_steady_mse.reserve(trials);

  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 engine = make_engine(mix_seed(seed, trial));
    VectorXd x = x0;
    KalmanState state{x0, MatrixXd::Zero(n, n)};
    double steady_sum = 0.0;
    for (int k = 0; k < horizon; ++k) {
      VectorXd target = xf - observed.A() * state.x_hat;
      if (project_target) target = target_map * target;
      const VectorXd u =
          omp(dictionary, target, sparsity, options.omp_tol).coefficients;
      VectorXd x_next = observed.A() * x + observed.B() * u +
                        v_sqrt * gaussian_vector(n, engine);
      VectorXd y =
          observed.C() * x_next + w_sqrt * gaussian_vector(p, engine);
      state = kalman_step(observed, state, u, y, noise);
      const double sq_error = (x_next - xf).squaredNorm();
      run.mse_per_step[k] += sq_error / trials;
      if (k >= horizon - window) steady_sum += sq_error;
      if (trial == 0) {
        if (k == 0) {
          run.states.push_back(x);
          run.estimates.push_back(x0);
        }
        run.states.push_back(x_next);
        run.estimates.push_back(state.x_hat);
        run.inputs.push_back(u);
      }
      x = std::move(x_next);
    }
    run.per_trial_steady_mse.push_back(steady_sum / window);
  }

  double mean = 0.0;
  for (double value : run.per_trial_steady_mse) mean += value;
  mean /= trials;
  run.steady_mse = mean;
  if (trials > 1) {
    double variance = 0.0;
    for (double value : run.per_trial_steady_mse) {
      variance += (value - mean) * (value - mean);
    }
    variance /= (trials - 1);
    run.steady_mse_se = std::sqrt(variance / trials);
  }

  try {
    const SteadyStateCovariance steady =
        steady_state_covariance(observed, noise);
    run.floor = mse_floor(observed, noise, steady.p);
    if (options.xi) {
      MseBoundInputs bound_inputs;
      bound_inputs.a = observed.A();
      bound_inputs.xi = *options.xi;
      bound_inputs.s = sparsity;
      bound_inputs.p = steady.p;
      bound_inputs.sigma_v = noise.sigma_v;
      bound_inputs.xf = xf;
      try {
        run.bound = mse_upper_bound(bound_inputs);
        run.bound_condition_holds = true;
      } catch (const BoundUndefinedError&) {
        run.bound_condition_holds = false;
      }
    }
  } catch (const NumericalError&) {
    // Leave floor/bound empty when the covariance iteration fails; the
    // empirical curves are still valid.
  }
  return run;
}

void write_tracking_csv(std::ostream& out, const TrackingRun& run,
                        const std::vector<std::string>& metadata_lines) {
  for (const auto& line : metadata_lines) {
    out << "# " << line << '\n';
  }
  out << "step,mse,mse_db,bound,floor\n";
  const std::string bound =
      run.bound ? format_number(*run.bound) : std::string();
  const std::string floor =
      run.floor ? format_number(*run.floor) : std::string();
  for (int k = 0; k < run.mse_per_step.size(); ++k) {
    const double mse = run.mse_per_step[k];
    const double db = mse > 0.0 ? 10.0 * std::log10(mse)
                                : -std::numeric_limits<double>::infinity();
    out << (k + 1) << ',' << format_number(mse) << ',' << format_number(db)
        << ',' << bound << ',' << floor << '\n';
  }
}

}  // namespace sparsact
