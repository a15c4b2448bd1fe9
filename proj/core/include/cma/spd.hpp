#pragma once

#include <Eigen/Dense>
#include <optional>
#include <variant>

#include "cma/errors.hpp"

namespace cma {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric positive definite matrix. Validated on construction:
/// symmetry up to 1e-12 relative and smallest eigenvalue > 1e-14 * largest.
/// Immutable after construction; eigendecomposition (descending eigenvalues)
/// is computed once and cached.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Matrix& a);
  /// 1x1 identity placeholder so states can be default-constructed.
  SpdMatrix() : SpdMatrix(Matrix::Identity(1, 1)) {}

  static SpdMatrix identity(int dim);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& mat() const { return mat_; }

  /// Eigenvalues sorted descending, with multiplicity.
  const Vector& eigenvalues() const { return eigenvalues_; }
  /// Columns are eigenvectors matching eigenvalues() order.
  const Matrix& eigenvectors() const { return eigenvectors_; }

  /// Symmetric positive definite square root.
  SpdMatrix sqrt() const;
  /// Inverse of the symmetric square root.
  SpdMatrix inv_sqrt() const;
  Matrix inverse() const;

  double trace() const { return mat_.trace(); }
  double det_root() const;  // det(A)^(1/dim)
  double cond() const { return eigenvalues_(0) / eigenvalues_(dim() - 1); }

  /// (A + A^T)/2, for cleaning float drift before revalidation.
  static Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

 private:
  Matrix mat_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// Degree-1 positively homogeneous normalization of an SPD matrix.
/// DetRoot: det(A)^(1/d). Eigen(i): i-th largest eigenvalue (1-based,
/// counted with multiplicity). MetricMinEigen(H): smallest eigenvalue in the
/// metric given by H, lambda_min(H^(1/2) A H^(1/2)) / lambda_min(H).
class NormalizationFn {
 public:
  enum class Kind { DetRoot, Eigen, MetricMinEigen };

  static NormalizationFn det_root();
  static NormalizationFn eigen(int index);
  static NormalizationFn metric_min_eigen(const SpdMatrix& h);

  Kind kind() const { return kind_; }
  int eigen_index() const { return eigen_index_; }

  double operator()(const SpdMatrix& a) const;

 private:
  NormalizationFn(Kind kind, int index) : kind_(kind), eigen_index_(index) {}
  Kind kind_;
  int eigen_index_ = 0;
  std::optional<SpdMatrix> metric_;
  std::optional<SpdMatrix> metric_sqrt_;
  double metric_min_eig_ = 1.0;
};

/// Smooth normalization rho(A) = det(A)^(1/d).
double rho(const SpdMatrix& a);

/// Directional derivative of rho: D rho(A)[H] = rho(A) * tr(A^-1 H) / d.
/// Invariant under scaling of A.
double d_rho(const SpdMatrix& a, const Matrix& h);

/// S with S*S = A; throws NonSpdError on invalid input.
SpdMatrix sym_sqrt(const SpdMatrix& a);

}  // namespace cma
