#pragma once

#include <Eigen/Core>

#include "sparsact/types.hpp"

namespace sparsact {

// Number of singular values above relative_tol * sigma_max * max(rows, cols).
int numerical_rank(const Eigen::Ref<const MatrixXd>& m,
                   RankTolerance tol = {});

// Degree q of the minimal polynomial of a square A: the smallest d >= 1 such
// that I, A, ..., A^d are linearly dependent. Always in [1, n].
int minimal_polynomial_degree(const Eigen::Ref<const MatrixXd>& a,
                              RankTolerance tol = {});

// Minimum-norm least-squares solution of M x = b via SVD with the shared
// rank threshold.
VectorXd min_norm_solve(const Eigen::Ref<const MatrixXd>& m,
                        const Eigen::Ref<const VectorXd>& b,
                        RankTolerance tol = {});

// Spectral norm (largest singular value).
double spectral_norm(const Eigen::Ref<const MatrixXd>& m);

// Incrementally grown orthonormal basis with re-orthogonalized Gram-Schmidt.
// Also tracks the triangular factor R with inserted = Q R, so least-squares
// on the inserted columns is a back-substitution.
class IncrementalBasis {
public:
  explicit IncrementalBasis(int dim);

  int dim() const { return dim_; }
  int size() const { return count_; }

  // Largest pre-orthogonalization column norm accepted so far (0 when empty);
  // the reference scale for acceptance decisions.
  double column_scale() const { return column_scale_; }

  // Orthonormal columns accepted so far (dim x size view).
  Eigen::Ref<const MatrixXd> q() const { return q_.leftCols(count_); }

  // Component of v orthogonal to the current span (two projection passes).
  VectorXd residual(const Eigen::Ref<const VectorXd>& v) const;
  double residual_norm(const Eigen::Ref<const VectorXd>& v) const;

  // Accepts v when its residual exceeds relative_tol * dim * the largest
  // column norm inserted so far (or ||v|| if larger); returns whether the
  // basis grew. The shared scale keeps acceptance consistent with the
  // numerical rank of the stacked columns.
  bool try_extend(const Eigen::Ref<const VectorXd>& v, RankTolerance tol = {});

  // Least-squares coefficients for the inserted (pre-orthogonalization)
  // columns against rhs; size() entries. Requires size() > 0.
  VectorXd solve_coefficients(const Eigen::Ref<const VectorXd>& rhs) const;

private:
  int dim_;
  int count_ = 0;
  double column_scale_ = 0.0;
  MatrixXd q_;
  MatrixXd r_;
};

}  // namespace sparsact
