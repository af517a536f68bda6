#include "sparsact/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>

namespace sparsact {

namespace {

double rank_threshold(const Eigen::VectorXd& singular_values,
                      Eigen::Index rows, Eigen::Index cols,
                      RankTolerance tol) {
  if (singular_values.size() == 0) return 0.0;
  const double largest = singular_values[0];
  return tol.relative_tol * largest *
         static_cast<double>(std::max(rows, cols));
}

}  // namespace

int numerical_rank(const Eigen::Ref<const MatrixXd>& m, RankTolerance tol) {
  if (!m.allFinite()) {
    throw std::invalid_argument("rank of a matrix with non-finite entries");
  }
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::BDCSVD<MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  const double threshold = rank_threshold(sv, m.rows(), m.cols(), tol);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > threshold) ++rank;
  }
  return rank;
}

int minimal_polynomial_degree(const Eigen::Ref<const MatrixXd>& a,
                              RankTolerance tol) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("minimal polynomial needs a square matrix");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("matrix has non-finite entries");
  }
  const int n = static_cast<int>(a.rows());
  if (n == 0) {
    throw std::invalid_argument("matrix must be non-empty");
  }
  // Columns are vectorized powers, normalized so the rank threshold treats
  // them on equal footing.
  MatrixXd stack(n * n, n + 1);
  MatrixXd power = MatrixXd::Identity(n, n);
  auto place = [&](int d) {
    Eigen::VectorXd col = Eigen::Map<const Eigen::VectorXd>(power.data(),
                                                            n * n);
    const double norm = col.norm();
    stack.col(d) = (norm > 0.0) ? Eigen::VectorXd(col / norm) : col;
  };
  place(0);
  for (int d = 1; d <= n; ++d) {
    power = a * power;
    place(d);
    if (numerical_rank(stack.leftCols(d + 1), tol) <= d) return d;
  }
  return n;
}

VectorXd min_norm_solve(const Eigen::Ref<const MatrixXd>& m,
                        const Eigen::Ref<const VectorXd>& b,
                        RankTolerance tol) {
  if (m.rows() != b.size()) {
    throw std::invalid_argument("right-hand side length must match rows");
  }
  Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double threshold = rank_threshold(sv, m.rows(), m.cols(), tol);
  VectorXd projected = svd.matrixU().transpose() * b;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    projected[i] = (sv[i] > threshold) ? projected[i] / sv[i] : 0.0;
  }
  return svd.matrixV() * projected;
}

double spectral_norm(const Eigen::Ref<const MatrixXd>& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::BDCSVD<MatrixXd> svd(m);
  return svd.singularValues()[0];
}

IncrementalBasis::IncrementalBasis(int dim) : dim_(dim) {
  if (dim <= 0) {
    throw std::invalid_argument("basis dimension must be positive");
  }
  q_ = MatrixXd::Zero(dim, dim);
  r_ = MatrixXd::Zero(dim, dim);
}

VectorXd IncrementalBasis::residual(const Eigen::Ref<const VectorXd>& v) const {
  if (v.size() != dim_) {
    throw std::invalid_argument("vector dimension mismatch");
  }
  if (count_ == 0) return v;
  const auto qv = q_.leftCols(count_);
  // Two passes of classical Gram-Schmidt keep orthogonality near machine
  // precision even for nearly dependent inserts.
  VectorXd w = v - qv * (qv.transpose() * v);
  w -= qv * (qv.transpose() * w);
  return w;
}

double IncrementalBasis::residual_norm(
    const Eigen::Ref<const VectorXd>& v) const {
  return residual(v).norm();
}

bool IncrementalBasis::try_extend(const Eigen::Ref<const VectorXd>& v,
                                  RankTolerance tol) {
  if (count_ >= dim_) return false;
  if (v.size() != dim_) {
    throw std::invalid_argument("vector dimension mismatch");
  }
  const double v_norm = v.norm();
  if (v_norm == 0.0) return false;
  const auto qv = q_.leftCols(count_);
  VectorXd coeffs = VectorXd::Zero(count_);
  VectorXd w = v;
  if (count_ > 0) {
    coeffs = qv.transpose() * v;
    w -= qv * coeffs;
    VectorXd correction = qv.transpose() * w;
    w -= qv * correction;
    coeffs += correction;
  }
  const double w_norm = w.norm();
  // The acceptance scale is the largest column seen so far, so decisions
  // compose the way a singular-value cut on the stacked columns would. A
  // per-candidate scale would happily accept long chains of nearly
  // dependent vectors whose joint rank collapses.
  const double scale = std::max(v_norm, column_scale_);
  if (w_norm <= tol.relative_tol * scale * dim_) return false;
  r_.col(count_).head(count_) = coeffs;
  r_(count_, count_) = w_norm;
  q_.col(count_) = w / w_norm;
  column_scale_ = scale;
  ++count_;
  return true;
}

VectorXd IncrementalBasis::solve_coefficients(
    const Eigen::Ref<const VectorXd>& rhs) const {
  if (count_ == 0) {
    throw std::logic_error("no columns inserted");
  }
  VectorXd projected = q_.leftCols(count_).transpose() * rhs;
  return r_.topLeftCorner(count_, count_)
      .triangularView<Eigen::Upper>()
      .solve(projected);
}

}  // namespace sparsact
