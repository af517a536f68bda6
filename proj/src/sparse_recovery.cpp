#include "sparsact/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sparsact/linalg.hpp"
#include "sparsact/rng.hpp"

namespace sparsact {

namespace {

// Correlations below this (relative to the residual norm) mean the residual
// is numerically orthogonal to the dictionary and pursuit must stop.
constexpr double kOrthogonalTol = 1e-10;

}  // namespace

OmpResult omp(const Eigen::Ref<const MatrixXd>& dictionary,
              const Eigen::Ref<const VectorXd>& target, int sparsity,
              double tol) {
  const int n = static_cast<int>(dictionary.rows());
  const int m = static_cast<int>(dictionary.cols());
  if (target.size() != n) {
    throw std::invalid_argument("target dimension must match the dictionary");
  }
  if (sparsity < 0) {
    throw std::invalid_argument("sparsity must be non-negative");
  }
  if (tol < 0.0) {
    throw std::invalid_argument("tolerance must be non-negative");
  }
  VectorXd col_norms(m);
  bool any_nonzero = false;
  for (int j = 0; j < m; ++j) {
    col_norms[j] = dictionary.col(j).norm();
    any_nonzero = any_nonzero || col_norms[j] > 0.0;
  }
  if (!any_nonzero) {
    throw std::invalid_argument("dictionary has no nonzero column");
  }

  OmpResult result;
  result.coefficients = VectorXd::Zero(m);
  const double target_norm = target.norm();
  result.residual_norms.push_back(target_norm);

  IncrementalBasis basis(n);
  VectorXd residual = target;
  double residual_norm = target_norm;
  while (static_cast<int>(result.support.size()) < sparsity &&
         residual_norm > tol * target_norm) {
    int best_j = -1;
    double best_corr = 0.0;
    for (int j = 0; j < m; ++j) {
      if (col_norms[j] == 0.0) continue;
      const double corr =
          std::abs(dictionary.col(j).dot(residual)) / col_norms[j];
      if (corr > best_corr) {
        best_corr = corr;
        best_j = j;
      }
    }
    if (best_j < 0 || best_corr <= kOrthogonalTol * residual_norm) break;
    // A column correlated with the residual cannot lie in the current span,
    // so the extension always succeeds.
    if (!basis.try_extend(dictionary.col(best_j))) break;
    result.support.push_back(best_j);
    const auto q = basis.q();
    residual = target - q * (q.transpose() * target);
    residual_norm = residual.norm();
    result.residual_norms.push_back(residual_norm);
  }
  if (!result.support.empty()) {
    VectorXd coeffs = basis.solve_coefficients(target);
    for (size_t i = 0; i < result.support.size(); ++i) {
      result.coefficients[result.support[i]] = coeffs[i];
    }
  }
  return result;
}

namespace {

// max_j (b_j^T v)^2 over unit-normalized columns; the quantity whose
// infimum over the sphere defines the decay factor.
double best_alignment(const MatrixXd& normalized, const VectorXd& v,
                      int* active = nullptr) {
  VectorXd corr = normalized.transpose() * v;
  double best = -1.0;
  int best_j = 0;
  for (int j = 0; j < corr.size(); ++j) {
    const double value = corr[j] * corr[j];
    if (value > best) {
      best = value;
      best_j = j;
    }
  }
  if (active) *active = best_j;
  return best;
}

}  // namespace

DecayFactorEstimate decay_factor(const Eigen::Ref<const MatrixXd>& b,
                                 int sample_budget, uint64_t seed) {
  const int n = static_cast<int>(b.rows());
  const int m = static_cast<int>(b.cols());
  if (n == 0 || m == 0) {
    throw std::invalid_argument("dictionary must be non-empty");
  }
  if (m == n) {
    MatrixXd gram = b.transpose() * b;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() < 1e-10) {
      return {1.0 - 1.0 / n, DecayMethod::analytic, 0, false};
    }
  }
  if (sample_budget <= 0) {
    throw std::invalid_argument(
        "sample budget must be positive for non-orthonormal dictionaries");
  }
  std::vector<int> nonzero;
  for (int j = 0; j < m; ++j) {
    if (b.col(j).norm() > 0.0) nonzero.push_back(j);
  }
  if (nonzero.empty()) {
    throw std::invalid_argument("dictionary has no nonzero column");
  }
  MatrixXd normalized(n, static_cast<int>(nonzero.size()));
  for (size_t idx = 0; idx < nonzero.size(); ++idx) {
    const auto col = b.col(nonzero[idx]);
    normalized.col(idx) = col / col.norm();
  }

  std::mt19937_64 engine = make_engine(mix_seed(seed, 0x5ca1ab1e));
  struct Candidate {
    double value;
    VectorXd v;
  };
  std::vector<Candidate> best_candidates;
  const size_t keep = 10;
  for (int i = 0; i < sample_budget; ++i) {
    VectorXd v = random_unit_vector(n, engine);
    const double value = best_alignment(normalized, v);
    if (best_candidates.size() < keep ||
        value < best_candidates.back().value) {
      best_candidates.push_back({value, std::move(v)});
      std::sort(best_candidates.begin(), best_candidates.end(),
                [](const Candidate& a, const Candidate& b_) {
                  return a.value < b_.value;
                });
      if (best_candidates.size() > keep) best_candidates.pop_back();
    }
  }
  double min_value = best_candidates.front().value;
  // Local subgradient descent on the active column pushes each candidate
  // toward a direction the dictionary covers poorly.
  const double steps[] = {0.5, 0.2, 0.05};
  for (auto& candidate : best_candidates) {
    VectorXd v = candidate.v;
    double value = candidate.value;
    for (int iter = 0; iter < 50; ++iter) {
      int active = 0;
      best_alignment(normalized, v, &active);
      const VectorXd grad =
          2.0 * normalized.col(active).dot(v) * normalized.col(active);
      double best_step_value = value;
      VectorXd best_step_v = v;
      for (double step : steps) {
        VectorXd moved = v - step * grad;
        const double norm = moved.norm();
        if (norm < 1e-12) continue;
        moved /= norm;
        const double moved_value = best_alignment(normalized, moved);
        if (moved_value < best_step_value) {
          best_step_value = moved_value;
          best_step_v = moved;
        }
      }
      if (best_step_value >= value) break;
      value = best_step_value;
      v = best_step_v;
    }
    min_value = std::min(min_value, value);
  }
  const double xi = std::clamp(1.0 - min_value, 0.0, 1.0);
  return {xi, DecayMethod::sampled, sample_budget, true};
}

}  // namespace sparsact
