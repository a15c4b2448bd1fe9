#include "cma/spd.hpp"

#include <cmath>
#include <sstream>

namespace cma {

namespace {

// Eigen's SelfAdjointEigenSolver sorts ascending; we flip to descending so
// that eigenvalue indices match the 1-based "i-th largest" convention.
void eig_descending(const Matrix& a, Vector& values, Matrix& vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NonSpdError("eigendecomposition failed");
  }
  const auto n = a.rows();
  values = solver.eigenvalues().reverse();
  vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
}

}  // namespace

SpdMatrix::SpdMatrix(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw NonSpdError("matrix is not square");
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * (1.0 + std::abs(a(i, j)))) {
        std::ostringstream msg;
        msg << "matrix is not symmetric at (" << i << "," << j << ")";
        throw NonSpdError(msg.str());
      }
    }
  }
  if (!a.allFinite()) throw NonSpdError("matrix has non-finite entries");
  mat_ = symmetrize(a);
  eig_descending(mat_, eigenvalues_, eigenvectors_);
  const double largest = eigenvalues_(0);
  const double smallest = eigenvalues_(dim() - 1);
  if (!(smallest > 0.0) || smallest <= 1e-14 * largest) {
    std::ostringstream msg;
    msg << "matrix is not positive definite: lambda_min=" << smallest
        << " lambda_max=" << largest;
    throw NonSpdError(msg.str());
  }
}

SpdMatrix SpdMatrix::identity(int dim) {
  return SpdMatrix(Matrix::Identity(dim, dim));
}

SpdMatrix SpdMatrix::sqrt() const {
  Matrix s = eigenvectors_ *
             eigenvalues_.array().sqrt().matrix().asDiagonal() *
             eigenvectors_.transpose();
  return SpdMatrix(symmetrize(s));
}

SpdMatrix SpdMatrix::inv_sqrt() const {
  Matrix s = eigenvectors_ *
             eigenvalues_.array().rsqrt().matrix().asDiagonal() *
             eigenvectors_.transpose();
  return SpdMatrix(symmetrize(s));
}

Matrix SpdMatrix::inverse() const {
  return symmetrize(eigenvectors_ *
                    eigenvalues_.array().inverse().matrix().asDiagonal() *
                    eigenvectors_.transpose());
}

double SpdMatrix::det_root() const {
  // Geometric mean of eigenvalues, via logs to dodge over/underflow.
  return std::exp(eigenvalues_.array().log().mean());
}

NormalizationFn NormalizationFn::det_root() {
  return NormalizationFn(Kind::DetRoot, 0);
}

NormalizationFn NormalizationFn::eigen(int index) {
  if (index < 1) throw IndexOutOfRangeError("eigen index must be >= 1");
  return NormalizationFn(Kind::Eigen, index);
}

NormalizationFn NormalizationFn::metric_min_eigen(const SpdMatrix& h) {
  NormalizationFn fn(Kind::MetricMinEigen, 0);
  fn.metric_ = h;
  fn.metric_sqrt_ = h.sqrt();
  fn.metric_min_eig_ = h.eigenvalues()(h.dim() - 1);
  return fn;
}

double NormalizationFn::operator()(const SpdMatrix& a) const {
  switch (kind_) {
    case Kind::DetRoot:
      return a.det_root();
    case Kind::Eigen: {
      if (eigen_index_ > a.dim()) {
        throw IndexOutOfRangeError("eigen index exceeds dimension");
      }
      return a.eigenvalues()(eigen_index_ - 1);
    }
    case Kind::MetricMinEigen: {
      const Matrix& hs = metric_sqrt_->mat();
      SpdMatrix conjugated(SpdMatrix::symmetrize(hs * a.mat() * hs));
      return conjugated.eigenvalues()(a.dim() - 1) / metric_min_eig_;
    }
  }
  throw std::logic_error("unreachable");
}

double rho(const SpdMatrix& a) { return a.det_root(); }

double d_rho(const SpdMatrix& a, const Matrix& h) {
  return rho(a) * (a.inverse() * h).trace() / a.dim();
}

SpdMatrix sym_sqrt(const SpdMatrix& a) { return a.sqrt(); }

}  // namespace cma
