#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace sparsact {

// Derives an independent stream seed from (seed, stream) via splitmix64.
// Used so that every trial / component of an experiment gets its own
// reproducible engine regardless of evaluation order.
uint64_t mix_seed(uint64_t seed, uint64_t stream);
uint64_t mix_seed(uint64_t seed, uint64_t stream_a, uint64_t stream_b);

inline std::mt19937_64 make_engine(uint64_t seed) {
  return std::mt19937_64(seed);
}

Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& engine);
Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& engine);
Eigen::VectorXd random_unit_vector(int n, std::mt19937_64& engine);

// Uniform integer in [0, bound).
int uniform_below(int bound, std::mt19937_64& engine);

// Symmetric PSD square root U sqrt(max(L, 0)) U^T used for noise sampling.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma);

}  // namespace sparsact
