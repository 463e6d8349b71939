#pragma once

// Dense kernels shared by every module.
//
// Storage order: all matrices use Eigen's default column-major layout, and
// vec_cols() is the column-major flattening. Every Kronecker identity in the
// library (e.g. (phi^T kron I) vec([A B]) = [A B] phi) relies on this.

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "texplore/errors.hpp"

namespace texplore {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatX<double>;
using Vec = VecX<double>;

template <typename Scalar>
struct SymEig {
  VecX<Scalar> eigenvalues;   // ascending
  MatX<Scalar> eigenvectors;  // orthogonal, columns match eigenvalues
};

// Relative symmetry slack accepted by sym_eig(): ||S - S^T||_F <= 1e-9 ||S||_F.
inline constexpr double kSymmetryTol = 1e-9;
// Absolute pivot floor for chol_upper().
inline constexpr double kPivotTol = 1e-12;

template <typename DerivedA, typename DerivedB>
MatX<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                     const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  MatX<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Derived>
VecX<typename Derived::Scalar> vec_cols(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatX<Scalar> tmp = m;
  return Eigen::Map<const VecX<Scalar>>(tmp.data(), tmp.size());
}

// Inverse of vec_cols().
template <typename Derived>
MatX<typename Derived::Scalar> unvec_cols(const Eigen::MatrixBase<Derived>& v,
                                          Eigen::Index rows, Eigen::Index cols) {
  using Scalar = typename Derived::Scalar;
  if (v.size() != rows * cols) {
    throw DimensionMismatch("unvec_cols: vector of length " + std::to_string(v.size()) +
                            " cannot be reshaped to " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
  VecX<Scalar> tmp = v;
  return Eigen::Map<const MatX<Scalar>>(tmp.data(), rows, cols);
}

template <typename Derived>
MatX<typename Derived::Scalar> symmetrize(const Eigen::MatrixBase<Derived>& s) {
  return (s + s.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
SymEig<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if (s.rows() != s.cols()) {
    throw DimensionMismatch("sym_eig: matrix is not square");
  }
  const Scalar norm = s.norm();
  const Scalar asym = (s - s.transpose()).norm();
  if (asym > Scalar(kSymmetryTol) * norm) {
    throw NotSymmetric("sym_eig: asymmetry " + std::to_string(double(asym)) +
                       " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> solver(symmetrize(s));
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("sym_eig: eigen iteration did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Derived>
typename Derived::Scalar min_eig(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if (s.rows() == 0) return Scalar(0);
  if (s.rows() != s.cols()) {
    throw DimensionMismatch("min_eig: matrix is not square");
  }
  const Scalar norm = s.norm();
  if ((s - s.transpose()).norm() > Scalar(kSymmetryTol) * norm) {
    throw NotSymmetric("min_eig: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatX<Scalar>> solver(symmetrize(s), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("min_eig: eigen iteration did not converge");
  }
  return solver.eigenvalues()(0);
}

template <typename Derived>
bool is_psd(const Eigen::MatrixBase<Derived>& s, typename Derived::Scalar tol) {
  return min_eig(s) >= -tol;
}

// Upper-triangular R with R^T R = s.
template <typename Derived>
MatX<typename Derived::Scalar> chol_upper(const Eigen::MatrixBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  if (s.rows() != s.cols()) {
    throw DimensionMismatch("chol_upper: matrix is not square");
  }
  const MatX<Scalar> sym = symmetrize(s);
  Eigen::LLT<MatX<Scalar>> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("chol_upper: matrix is not positive definite");
  }
  MatX<Scalar> r = llt.matrixU();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    if (!(r(i, i) * r(i, i) > Scalar(kPivotTol))) {
      throw NotPositiveDefinite("chol_upper: pivot below tolerance");
    }
  }
  return r;
}

}  // namespace texplore
