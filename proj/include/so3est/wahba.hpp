#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "so3est/errors.hpp"
#include "so3est/random.hpp"
#include "so3est/so3.hpp"

namespace so3est {

namespace tolerance {
/// Third singular value of a vector set, relative to the first, below which it is rank deficient.
inline constexpr double kRank = 1e-6;
/// Column norms of a unit vector set must lie in [1 - kUnit, 1 + kUnit].
inline constexpr double kUnit = 1e-6;
/// |det L| must exceed kSingular * |L|_F^3.
inline constexpr double kSingular = 1e-12;
/// Eigenvalues of RRᵀ below kEigenFloor * (largest eigenvalue) are rejected.
inline constexpr double kEigenFloor = 1e-12;
}  // namespace tolerance

/// Checks that `vectors` is a 3 x n (n >= 3) matrix of rank 3, optionally with unit columns.
template <typename Derived>
void validate_vector_set(const Eigen::MatrixBase<Derived>& vectors, bool unit = false,
                         const char* what = "vector set") {
  using Scalar = typename Derived::Scalar;
  const std::string name(what);
  if (vectors.rows() != 3) throw Error(ErrorCode::ShapeMismatch, name + " must have 3 rows");
  if (vectors.cols() < 3) throw Error(ErrorCode::RankDeficient, name + " needs at least 3 columns");
  if (!vectors.allFinite()) throw Error(ErrorCode::InvalidArgument, name + " has non-finite entries");
  Eigen::JacobiSVD<Matrix3X<Scalar>> svd(vectors.eval());
  const auto& sv = svd.singularValues();
  if (!(sv(2) >= Scalar(tolerance::kRank) * sv(0))) {
    throw Error(ErrorCode::RankDeficient, name + " is not of rank 3");
  }
  if (unit) {
    using std::abs;
    const auto norms = vectors.colwise().norm();
    if ((norms.array() - Scalar(1)).abs().maxCoeff() > Scalar(tolerance::kUnit)) {
      throw Error(ErrorCode::InvalidArgument, name + " columns are not unit vectors");
    }
  }
}

template <typename Derived>
void validate_weights(const Eigen::MatrixBase<Derived>& weights, Eigen::Index n) {
  if (weights.size() != n) throw Error(ErrorCode::ShapeMismatch, "weight count differs from vector count");
  if (!weights.allFinite() || (weights.array() <= 0).any()) {
    throw Error(ErrorCode::InvalidArgument, "weights must be positive and finite");
  }
}

/// The attitude profile matrix L with its determinant cached.
template <typename Scalar>
struct AttitudeProfile {
  Matrix3<Scalar> L;
  Scalar det;
};

/// Wraps an arbitrary 3x3 profile (e.g. a filter's L_k); throws SingularProfile when nearly singular.
template <typename Derived>
AttitudeProfile<typename Derived::Scalar> make_profile(const Eigen::MatrixBase<Derived>& l) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::pow;
  const Matrix3<Scalar> m = l;
  if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, "profile matrix has non-finite entries");
  const Scalar det = m.determinant();
  const Scalar scale = pow(m.norm(), 3);
  if (!(abs(det) > Scalar(tolerance::kSingular) * scale)) {
    throw Error(ErrorCode::SingularProfile, "attitude profile matrix is singular");
  }
  return {m, det};
}

/// L = E diag(W) Bᵀ for inertial directions E and measured body directions B.
template <typename DerivedE, typename DerivedW, typename DerivedB>
AttitudeProfile<typename DerivedE::Scalar> build_profile(const Eigen::MatrixBase<DerivedE>& e,
                                                         const Eigen::MatrixBase<DerivedW>& w,
                                                         const Eigen::MatrixBase<DerivedB>& b) {
  if (e.rows() != 3 || b.rows() != 3 || e.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "E and B must both be 3 x n with equal n");
  }
  validate_weights(w, e.cols());
  try {
    validate_vector_set(e, false, "E");
    validate_vector_set(b, false, "B");
  } catch (const Error& err) {
    if (err.code() == ErrorCode::RankDeficient) throw Error(ErrorCode::SingularProfile, err.what());
    throw;
  }
  return make_profile(e * w.asDiagonal() * b.transpose());
}

namespace detail {

/// Makes a QR pair proper: if det(Q) = -1, negates the last column of Q and the last
/// row of R. The product Q R is unchanged.
template <typename Scalar>
void orient_qr(Matrix3<Scalar>& q, Matrix3<Scalar>& r) {
  if (q.determinant() < Scalar(0)) {
    q.col(2) = -q.col(2);
    r.row(2) = -r.row(2);
  }
}

}  // namespace detail

struct SolveOptions {
  /// When det(L) <= 0, return the sign-corrected SVD solution instead of throwing ReflectionProfile.
  bool reflection_fallback = false;
};

template <typename Scalar>
struct AttitudeSolution {
  Matrix3<Scalar> C_hat;
  /// C_hat = S L. Positive definite on the QR path; only symmetric on the reflection fallback.
  Matrix3<Scalar> S;
};

/// Minimizer of the weighted vector-alignment cost over SO(3).
///
/// Takes a QR factorization L = QR with Q forced into SO(3), forms the principal inverse
/// square root of RRᵀ from its eigendecomposition, and returns C_hat = S L with
/// S = Q (RRᵀ)^(-1/2) Qᵀ. Requires det(L) > 0; see SolveOptions for the alternative.
template <typename Scalar>
AttitudeSolution<Scalar> solve_attitude(const AttitudeProfile<Scalar>& profile,
                                        const SolveOptions& options = {}) {
  using std::sqrt;
  const Matrix3<Scalar>& l = profile.L;
  if (!(profile.det > Scalar(0))) {
    if (!options.reflection_fallback) {
      throw Error(ErrorCode::ReflectionProfile, "det(L) <= 0; no proper rotation of the form S L with S > 0");
    }
    Eigen::JacobiSVD<Matrix3<Scalar>> svd(l, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix3<Scalar>& u = svd.matrixU();
    const Matrix3<Scalar>& v = svd.matrixV();
    Vector3<Scalar> d(Scalar(1), Scalar(1), (u * v.transpose()).determinant() < 0 ? Scalar(-1) : Scalar(1));
    AttitudeSolution<Scalar> out;
    out.C_hat = u * d.asDiagonal() * v.transpose();
    out.S = symmetric_part(Matrix3<Scalar>(out.C_hat * l.inverse()));
    return out;
  }

  Eigen::HouseholderQR<Matrix3<Scalar>> qr(l);
  Matrix3<Scalar> q = qr.householderQ();
  Matrix3<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  detail::orient_qr(q, r);

  Eigen::SelfAdjointEigenSolver<Matrix3<Scalar>> eig(Matrix3<Scalar>(r * r.transpose()));
  const Vector3<Scalar>& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > Scalar(tolerance::kEigenFloor) * lambda.maxCoeff())) {
    throw Error(ErrorCode::SingularProfile, "R Rᵀ is numerically singular");
  }
  const Matrix3<Scalar>& basis = eig.eigenvectors();
  const Vector3<Scalar> inv_root = lambda.cwiseSqrt().cwiseInverse();
  const Matrix3<Scalar> root = basis * inv_root.asDiagonal() * basis.transpose();

  AttitudeSolution<Scalar> out;
  out.S = symmetric_part(Matrix3<Scalar>(q * root * q.transpose()));
  out.C_hat = out.S * l;
  return out;
}

/// J0 = 1/2 <E - C B, (E - C B) W>.
template <typename DerivedC, typename DerivedE, typename DerivedB, typename DerivedW>
typename DerivedC::Scalar cost_J0(const Eigen::MatrixBase<DerivedC>& c_hat,
                                  const Eigen::MatrixBase<DerivedE>& e,
                                  const Eigen::MatrixBase<DerivedB>& b,
                                  const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedC::Scalar;
  if (c_hat.rows() != 3 || c_hat.cols() != 3 || e.rows() != 3 || b.rows() != 3 ||
      e.cols() != b.cols() || w.size() != e.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "cost_J0 operands are not conformable");
  }
  const Matrix3X<Scalar> residual = e - c_hat * b;
  return trace_inner(residual, Matrix3X<Scalar>(residual * w.asDiagonal())) / Scalar(2);
}

/// max |C_hatᵀ L - Lᵀ C_hat|; zero at any stationary point.
template <typename DerivedC, typename DerivedL>
typename DerivedC::Scalar stationarity_residual(const Eigen::MatrixBase<DerivedC>& c_hat,
                                                const Eigen::MatrixBase<DerivedL>& l) {
  return max_abs(c_hat.transpose() * l - l.transpose() * c_hat);
}

/// Probe test for a local minimum of J0: evaluates C exp(+-eps U) along n_probes random
/// unit directions U and reports false if any probe lowers the cost by more than 1e-12.
template <typename DerivedC, typename DerivedE, typename DerivedB, typename DerivedW>
bool check_local_minimality(const Eigen::MatrixBase<DerivedC>& c_hat,
                            const Eigen::MatrixBase<DerivedE>& e,
                            const Eigen::MatrixBase<DerivedB>& b,
                            const Eigen::MatrixBase<DerivedW>& w, int n_probes, double eps,
                            std::uint64_t seed = 0) {
  using Scalar = typename DerivedC::Scalar;
  const Matrix3<Scalar> c = c_hat;
  const Scalar base = cost_J0(c, e, b, w);
  Rng rng(seed);
  for (int i = 0; i < n_probes; ++i) {
    const Vector3<Scalar> dir = rng.unit_vector().template cast<Scalar>();
    for (Scalar sign : {Scalar(1), Scalar(-1)}) {
      const Matrix3<Scalar> probe = c * exp_so3(hat(Vector3<Scalar>(sign * Scalar(eps) * dir)));
      if (cost_J0(probe, e, b, w) < base - Scalar(1e-12)) return false;
    }
  }
  return true;
}

}  // namespace so3est
