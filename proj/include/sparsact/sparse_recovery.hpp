#pragma once

#include <cstdint>
#include <vector>

#include "sparsact/types.hpp"

namespace sparsact {

struct OmpResult {
  // Full-length coefficient vector, zero off the support.
  VectorXd coefficients;
  // Atom indices in selection order.
  std::vector<int> support;
  // ||target||, then the residual norm after each accepted atom; strictly
  // decreasing until termination.
  std::vector<double> residual_norms;
};

// Orthogonal matching pursuit: repeatedly picks the column with the largest
// normalized correlation |b_j^T r| / ||b_j|| (lowest index on ties), then
// re-solves least squares on the support. Stops at sparsity atoms, when the
// residual drops to tol * ||target||, or when the residual is numerically
// orthogonal to every column. Zero columns are skipped.
OmpResult omp(const Eigen::Ref<const MatrixXd>& dictionary,
              const Eigen::Ref<const VectorXd>& target, int sparsity,
              double tol = 1e-12);

enum class DecayMethod { analytic, sampled };

struct DecayFactorEstimate {
  double value = 0.0;
  DecayMethod method = DecayMethod::sampled;
  int samples = 0;
  // True when the value came from sampling and may undershoot the true
  // supremum-based factor.
  bool is_lower_estimate = false;
};

// Worst-case one-atom residual decay factor
// 1 - inf_{||v||=1} max_j (b_j^T v)^2 / ||b_j||^2.
// Exactly 1 - 1/n when the columns are orthonormal (checked within 1e-10);
// otherwise estimated from seeded unit-sphere samples refined by a short
// local descent, flagged as a lower estimate.
DecayFactorEstimate decay_factor(const Eigen::Ref<const MatrixXd>& b,
                                 int sample_budget = 10000, uint64_t seed = 0);

}  // namespace sparsact
