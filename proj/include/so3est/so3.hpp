#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "so3est/errors.hpp"

namespace so3est {

template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3X = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix3d = Matrix3<double>;
using Vector3d = Vector3<double>;
using Matrix3Xd = Matrix3X<double>;
using VectorXd = VectorX<double>;

namespace tolerance {
/// Max-norm bound on CᵀC - I and on |det C - 1| for a valid attitude.
inline constexpr double kRotation = 1e-9;
/// Max-norm bound on X + Xᵀ (relative to max(1, |X|max)) for a valid skew matrix.
inline constexpr double kSkew = 1e-12;
/// Max-norm bound on S - Sᵀ (relative to max(1, |S|max)) for a symmetric matrix.
inline constexpr double kSymmetric = 1e-12;
}  // namespace tolerance

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : m.cwiseAbs().maxCoeff();
}

/// Cross-product matrix: hat(v) * w == v.cross(w).
template <typename Derived>
Matrix3<typename Derived::Scalar> hat(const Eigen::MatrixBase<Derived>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  Matrix3<Scalar> x;
  x << Scalar(0), -v(2), v(1),
       v(2), Scalar(0), -v(0),
       -v(1), v(0), Scalar(0);
  return x;
}

template <typename Derived>
Matrix3<typename Derived::Scalar> skew_part(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
Matrix3<typename Derived::Scalar> symmetric_part(const Eigen::MatrixBase<Derived>& a) {
  return (a + a.transpose()) / typename Derived::Scalar(2);
}

template <typename Derived>
bool is_skew(const Eigen::MatrixBase<Derived>& x, double tol = tolerance::kSkew) {
  using std::max;
  using Scalar = typename Derived::Scalar;
  if (x.rows() != 3 || x.cols() != 3 || !x.allFinite()) return false;
  const Scalar scale = max(Scalar(1), max_abs(x));
  return max_abs(x + x.transpose()) <= Scalar(tol) * scale;
}

template <typename Derived>
bool is_rotation(const Eigen::MatrixBase<Derived>& c, double tol = tolerance::kRotation) {
  using Scalar = typename Derived::Scalar;
  if (c.rows() != 3 || c.cols() != 3 || !c.allFinite()) return false;
  const Matrix3<Scalar> gram = c.transpose() * c - Matrix3<Scalar>::Identity();
  using std::abs;
  return max_abs(gram) <= Scalar(tol) && abs(c.determinant() - Scalar(1)) <= Scalar(tol);
}

/// Symmetric within tolerance and with strictly positive smallest eigenvalue.
template <typename Derived>
bool is_symmetric_pd(const Eigen::MatrixBase<Derived>& s, double tol = tolerance::kSymmetric) {
  using std::max;
  using Scalar = typename Derived::Scalar;
  if (s.rows() != 3 || s.cols() != 3 || !s.allFinite()) return false;
  const Scalar scale = max(Scalar(1), max_abs(s));
  if (max_abs(s - s.transpose()) > Scalar(tol) * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix3<Scalar>> eig(symmetric_part(s), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() > Scalar(0);
}

template <typename Derived>
void require_skew(const Eigen::MatrixBase<Derived>& x, const char* what = "matrix") {
  if (!is_skew(x)) throw Error(ErrorCode::NotSkew, std::string(what) + " is not skew-symmetric");
}

template <typename Derived>
void require_rotation(const Eigen::MatrixBase<Derived>& c, const char* what = "matrix") {
  if (!is_rotation(c)) throw Error(ErrorCode::NotRotation, std::string(what) + " is not in SO(3)");
}

template <typename Derived>
void require_symmetric_pd(const Eigen::MatrixBase<Derived>& s, const char* what = "matrix") {
  if (!is_symmetric_pd(s)) {
    throw Error(ErrorCode::NotSymmetricPD, std::string(what) + " is not symmetric positive definite");
  }
}

/// Inverse of hat. Throws NotSkew when x fails the skew tolerance.
template <typename Derived>
Vector3<typename Derived::Scalar> vee(const Eigen::MatrixBase<Derived>& x) {
  require_skew(x, "vee argument");
  return Vector3<typename Derived::Scalar>(x(2, 1), x(0, 2), x(1, 0));
}

/// Matrix exponential so(3) -> SO(3) by Rodrigues' formula.
template <typename Derived>
Matrix3<typename Derived::Scalar> exp_so3(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Vector3<Scalar> w(x(2, 1), x(0, 2), x(1, 0));
  const Matrix3<Scalar> k = hat(w);
  const Scalar theta2 = w.squaredNorm();
  const Scalar theta = sqrt(theta2);
  Scalar a;
  Scalar b;
  if (theta < Scalar(1e-6)) {
    // sin(t)/t and (1 - cos t)/t^2 to O(t^4)
    a = Scalar(1) - theta2 / Scalar(6) + theta2 * theta2 / Scalar(120);
    b = Scalar(0.5) - theta2 / Scalar(24) + theta2 * theta2 / Scalar(720);
  } else {
    a = sin(theta) / theta;
    b = (Scalar(1) - cos(theta)) / theta2;
  }
  return Matrix3<Scalar>::Identity() + a * k + b * (k * k);
}

/// <A, B> = trace(AᵀB). Throws ShapeMismatch for non-conformable operands.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar trace_inner(const Eigen::MatrixBase<DerivedA>& a,
                                      const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "trace_inner operands differ in shape");
  }
  return a.cwiseProduct(b).sum();
}

/// Rotation angle of C1ᵀC2 in [0, pi], i.e. arccos((trace - 1) / 2). Evaluated with
/// atan2 so small angles keep full precision.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar principal_angle(const Eigen::MatrixBase<DerivedA>& c1,
                                          const Eigen::MatrixBase<DerivedB>& c2) {
  using Scalar = typename DerivedA::Scalar;
  using std::atan2;
  const Matrix3<Scalar> r = c1.transpose() * c2;
  const Vector3<Scalar> s(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return atan2(s.norm() / Scalar(2), (r.trace() - Scalar(1)) / Scalar(2));
}

/// e_C = C_hatᵀ C - I.
template <typename DerivedA, typename DerivedB>
Matrix3<typename DerivedA::Scalar> attitude_error(const Eigen::MatrixBase<DerivedA>& c_hat,
                                                  const Eigen::MatrixBase<DerivedB>& c) {
  return c_hat.transpose() * c - Matrix3<typename DerivedA::Scalar>::Identity();
}

}  // namespace so3est
