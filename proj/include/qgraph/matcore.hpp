#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "qgraph/errors.hpp"

namespace qgraph {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

template <typename Derived>
using PlainOf = typename Derived::PlainObject;

struct MatTolerances {
  double pivot = 1e-14;
  double hermitian = 1e-10;
};

// Max absolute row sum.
template <typename Derived>
double norm_inf(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename Derived>
double norm2(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<PlainOf<Derived>> svd(a.eval());
  return svd.singularValues()(0);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> adjoint(
    const Eigen::MatrixBase<Derived>& a) {
  return a.adjoint();
}

template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> solve(
    const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
    const MatTolerances& tol = {}) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "solve: matrix not square");
  if (b.rows() != a.rows()) throw Error(ErrorKind::DimensionMismatch, "solve: right-hand side rows");
  Eigen::PartialPivLU<PlainOf<DA>> lu(a.eval());
  const double scale = norm_inf(a);
  const double smallest = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(smallest >= tol.pivot * scale) || scale == 0.0)
    throw Error(ErrorKind::SingularMatrix, "solve: pivot below threshold");
  return lu.solve(b.template cast<typename DA::Scalar>());
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> inverse(
    const Eigen::MatrixBase<Derived>& a, const MatTolerances& tol = {}) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  return solve(a, M::Identity(a.rows(), a.cols()), tol);
}

template <typename Scalar>
struct HermEig {
  RVector values;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
};

template <typename Derived>
HermEig<typename Derived::Scalar> herm_eig(const Eigen::MatrixBase<Derived>& a,
                                           const MatTolerances& tol = {}) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "herm_eig: not square");
  M dense = a;
  const double scale = norm_inf(dense);
  if (norm_inf(M(dense - dense.adjoint())) > tol.hermitian * scale)
    throw Error(ErrorKind::NotHermitian, "herm_eig: input not Hermitian");
  M sym = (dense + dense.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<M> es(sym);
  return {es.eigenvalues(), es.eigenvectors()};
}

// Orthonormal basis of the kernel; dimension counts singular values <= tol * sigma_max.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> null_space(
    const Eigen::MatrixBase<Derived>& a, double tol) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index n = a.cols();
  if (a.rows() == 0) return M::Identity(n, n);
  Eigen::JacobiSVD<M> svd(a.eval(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * smax) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

template <typename Derived>
typename Derived::Scalar det_lu(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "det_lu: not square");
  if (a.rows() == 0) return typename Derived::Scalar(1);
  Eigen::PartialPivLU<PlainOf<Derived>> lu(a.eval());
  return lu.determinant();
}

template <typename Derived>
RVector singular_values(const Eigen::MatrixBase<Derived>& a) {
  Eigen::JacobiSVD<PlainOf<Derived>> svd(a.eval());
  return svd.singularValues();
}

// Hermitian square root of the inverse of a positive definite matrix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> inv_sqrt_pd(
    const Eigen::MatrixBase<Derived>& a) {
  auto eig = herm_eig(a);
  RVector d = eig.values.array().rsqrt();
  return eig.vectors * d.asDiagonal() * eig.vectors.adjoint();
}

// Thin orthonormal basis of the column span (full column rank assumed).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> orth_columns(
    const Eigen::MatrixBase<Derived>& a) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::HouseholderQR<M> qr(a.eval());
  return qr.householderQ() * M::Identity(a.rows(), a.cols());
}

}  // namespace qgraph
