#include "sparsact/rng.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace sparsact {

namespace {

// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream + 0x632be59bd9b4e019ULL));
}

uint64_t mix_seed(uint64_t seed, uint64_t stream_a, uint64_t stream_b) {
  return mix_seed(mix_seed(seed, stream_a), stream_b);
}

Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(engine);
  return v;
}

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = normal(engine);
  }
  return m;
}

Eigen::VectorXd random_unit_vector(int n, std::mt19937_64& engine) {
  for (;;) {
    Eigen::VectorXd v = gaussian_vector(n, engine);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

int uniform_below(int bound, std::mt19937_64& engine) {
  std::uniform_int_distribution<int> dist(0, bound - 1);
  return dist(engine);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() *
         eig.eigenvectors().transpose();
}

}  // namespace sparsact
