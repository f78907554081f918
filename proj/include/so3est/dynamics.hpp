#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "so3est/errors.hpp"
#include "so3est/random.hpp"
#include "so3est/so3.hpp"

namespace so3est {

/// trace(K) I - K. Maps vee coordinates through X -> K X + X K.
template <typename Derived>
Matrix3<typename Derived::Scalar> reduction_matrix(const Eigen::MatrixBase<Derived>& k) {
  return k.trace() * Matrix3<typename Derived::Scalar>::Identity() - k;
}

/// Body inertia in the Lagrangian's convention (Lambda) together with the classical
/// inertia tensor K = trace(Lambda) I - Lambda that acts on angular-velocity vectors.
template <typename Scalar>
struct InertiaSpec {
  Matrix3<Scalar> Lambda;
  Matrix3<Scalar> K;
};

template <typename Derived>
InertiaSpec<typename Derived::Scalar> make_inertia(const Eigen::MatrixBase<Derived>& lambda) {
  require_symmetric_pd(lambda, "inertia Lambda");
  using Scalar = typename Derived::Scalar;
  const Matrix3<Scalar> sym = symmetric_part(lambda);
  return {sym, reduction_matrix(sym)};
}

/// J_K(X) = K X + X K.
template <typename DerivedK, typename DerivedX>
Matrix3<typename DerivedK::Scalar> j_apply(const Eigen::MatrixBase<DerivedK>& k,
                                           const Eigen::MatrixBase<DerivedX>& x) {
  return k * x + x * k;
}

template <typename Scalar, typename DerivedX>
Matrix3<Scalar> j_apply(const InertiaSpec<Scalar>& inertia, const Eigen::MatrixBase<DerivedX>& omega) {
  return j_apply(inertia.Lambda, omega);
}

/// Unique skew X with K X + X K = M, for symmetric positive definite K and skew M.
template <typename DerivedK, typename DerivedM>
Matrix3<typename DerivedK::Scalar> j_solve(const Eigen::MatrixBase<DerivedK>& k,
                                           const Eigen::MatrixBase<DerivedM>& m) {
  using Scalar = typename DerivedK::Scalar;
  const Vector3<Scalar> rhs = vee(m);
  return hat(Vector3<Scalar>(reduction_matrix(k).llt().solve(rhs)));
}

template <typename Scalar>
Scalar kinetic_energy(const InertiaSpec<Scalar>& inertia, const Matrix3<Scalar>& omega) {
  return trace_inner(omega, Matrix3<Scalar>(omega * inertia.Lambda)) / Scalar(2);
}

/// C J(Omega) Cᵀ, conserved along torque-free motion.
template <typename Scalar>
Matrix3<Scalar> spatial_momentum(const InertiaSpec<Scalar>& inertia, const Matrix3<Scalar>& c,
                                 const Matrix3<Scalar>& omega) {
  return c * j_apply(inertia, omega) * c.transpose();
}

/// Attitude-dependent potential V(C) with its ambient gradient dV/dC (a 3x3 matrix).
template <typename Scalar>
struct PotentialModel {
  std::function<Scalar(const Matrix3<Scalar>&)> value;
  std::function<Matrix3<Scalar>(const Matrix3<Scalar>&)> gradient;
};

template <typename Scalar = double>
PotentialModel<Scalar> zero_potential() {
  return {[](const Matrix3<Scalar>&) { return Scalar(0); },
          [](const Matrix3<Scalar>&) { return Matrix3<Scalar>::Zero().eval(); }};
}

/// V(C) = trace(Aᵀ C); covers uniform gravity acting at an offset centre of mass.
template <typename Scalar>
PotentialModel<Scalar> linear_potential(const Matrix3<Scalar>& a) {
  return {[a](const Matrix3<Scalar>& c) { return trace_inner(a, c); },
          [a](const Matrix3<Scalar>&) { return a; }};
}

/// Gravity-gradient potential V(C) = -(3/2) kappa rᵀ C K Cᵀ r about a fixed inertial
/// direction r, with kappa = mu / |r|^3 and K the classical inertia tensor.
template <typename Scalar>
PotentialModel<Scalar> gravity_gradient_potential(Scalar kappa, const Vector3<Scalar>& direction,
                                                  const InertiaSpec<Scalar>& inertia) {
  const Vector3<Scalar> r = direction.normalized();
  const Matrix3<Scalar> k = inertia.K;
  return {[=](const Matrix3<Scalar>& c) {
            return Scalar(-1.5) * kappa * r.dot(c * k * c.transpose() * r);
          },
          [=](const Matrix3<Scalar>& c) {
            return Matrix3<Scalar>(Scalar(-3) * kappa * (r * r.transpose()) * c * k);
          }};
}

template <typename Scalar>
struct BodyState {
  Scalar t;
  Matrix3<Scalar> C;
  Matrix3<Scalar> Omega;
};

template <typename Scalar>
struct StateDerivative {
  Matrix3<Scalar> C_dot;
  Matrix3<Scalar> Omega_dot;
};

namespace detail {

/// -Cᵀ dV/dC + (dV/dC)ᵀ C, checked for skew symmetry.
template <typename Scalar>
Matrix3<Scalar> potential_moment(const PotentialModel<Scalar>& potential, const Matrix3<Scalar>& c) {
  const Matrix3<Scalar> grad = potential.gradient(c);
  const Matrix3<Scalar> moment = grad.transpose() * c - c.transpose() * grad;
  if (!is_skew(moment)) {
    throw Error(ErrorCode::PotentialGradientNotSkewCompatible,
                "potential moment is not skew (non-finite gradient?)");
  }
  return moment;
}

/// Angular acceleration in vee coordinates: K w_dot = (K w) x w + vee(moment).
template <typename Scalar>
Vector3<Scalar> angular_acceleration(const InertiaSpec<Scalar>& inertia,
                                     const Eigen::LLT<Matrix3<Scalar>>& k_factor,
                                     const PotentialModel<Scalar>& potential,
                                     const Matrix3<Scalar>& c, const Vector3<Scalar>& w) {
  const Matrix3<Scalar> moment = potential_moment(potential, c);
  const Vector3<Scalar> rhs = (inertia.K * w).cross(w) + Vector3<Scalar>(moment(2, 1), moment(0, 2), moment(1, 0));
  return k_factor.solve(rhs);
}

/// Inverse right Jacobian of exp applied to w: theta_dot for C0 exp(hat(theta)) with body rate w.
template <typename Scalar>
Vector3<Scalar> dexp_inv(const Vector3<Scalar>& theta, const Vector3<Scalar>& w) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar t2 = theta.squaredNorm();
  Scalar coeff;
  if (t2 < Scalar(1e-8)) {
    coeff = Scalar(1) / Scalar(12) + t2 / Scalar(720);
  } else {
    const Scalar t = sqrt(t2);
    coeff = Scalar(1) / t2 - (Scalar(1) + cos(t)) / (Scalar(2) * t * sin(t));
  }
  const Vector3<Scalar> tw = theta.cross(w);
  return w + tw / Scalar(2) + coeff * theta.cross(tw);
}

}  // namespace detail

/// Kinematics C_dot = C Omega and Euler's equation
/// J(Omega_dot) = [J(Omega), Omega] - Cᵀ dV/dC + (dV/dC)ᵀ C.
template <typename Scalar>
StateDerivative<Scalar> euler_rhs(const BodyState<Scalar>& state, const InertiaSpec<Scalar>& inertia,
                                  const PotentialModel<Scalar>& potential) {
  const Matrix3<Scalar> momentum = j_apply(inertia, state.Omega);
  const Matrix3<Scalar> rhs =
      (momentum * state.Omega - state.Omega * momentum) + detail::potential_moment(potential, state.C);
  if (!is_skew(rhs)) {
    throw Error(ErrorCode::PotentialGradientNotSkewCompatible, "Euler right-hand side is not skew");
  }
  return {state.C * state.Omega, j_solve(inertia.Lambda, rhs)};
}

struct IntegratorConfig {
  double step = 1e-3;
  /// Only "rkmk4" (fourth-order Runge-Kutta-Munthe-Kaas on SO(3)) is implemented.
  std::string scheme = "rkmk4";
};

inline void validate_integrator(const IntegratorConfig& cfg) {
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) {
    throw Error(ErrorCode::InvalidArgument, "integrator step must be positive");
  }
  if (cfg.scheme != "rkmk4") throw Error(ErrorCode::InvalidArgument, "unknown integrator scheme '" + cfg.scheme + "'");
}

/// Integrates (C, Omega) from state.t to t_end with RKMK4: the attitude is advanced as
/// C exp(hat(theta)) so it stays on SO(3) without re-orthogonalization. Uses fixed steps
/// of cfg.step and one shorter final step. Throws StepTooLarge if a step would rotate
/// the body by more than pi/4.
template <typename Scalar>
BodyState<Scalar> propagate(const BodyState<Scalar>& state, const InertiaSpec<Scalar>& inertia,
                            const PotentialModel<Scalar>& potential, Scalar t_end,
                            const IntegratorConfig& cfg = {}) {
  using std::abs;
  using std::ceil;
  validate_integrator(cfg);
  if (!(t_end >= state.t)) throw Error(ErrorCode::InvalidArgument, "t_end precedes the state time");

  const Scalar step = Scalar(cfg.step);
  const Scalar span = t_end - state.t;
  if (span == Scalar(0)) return state;
  const auto n_steps = static_cast<long long>(std::max(Scalar(1), ceil(span / step - Scalar(1e-9))));

  const Eigen::LLT<Matrix3<Scalar>> k_factor(inertia.K);
  const auto accel = [&](const Matrix3<Scalar>& c, const Vector3<Scalar>& w) {
    return detail::angular_acceleration(inertia, k_factor, potential, c, w);
  };
  const Scalar max_rotation = Scalar(std::numbers::pi / 4);

  Matrix3<Scalar> c = state.C;
  Vector3<Scalar> w = vee(state.Omega);
  Scalar t = state.t;
  for (long long i = 0; i < n_steps; ++i) {
    const Scalar t_next = (i + 1 == n_steps) ? t_end : state.t + Scalar(i + 1) * step;
    const Scalar h = t_next - t;

    const Vector3<Scalar> u1 = w;
    const Vector3<Scalar> a1 = accel(c, w);

    const Vector3<Scalar> th2 = h / Scalar(2) * u1;
    const Vector3<Scalar> w2 = w + h / Scalar(2) * a1;
    const Vector3<Scalar> u2 = detail::dexp_inv(th2, w2);
    const Vector3<Scalar> a2 = accel(Matrix3<Scalar>(c * exp_so3(hat(th2))), w2);

    const Vector3<Scalar> th3 = h / Scalar(2) * u2;
    const Vector3<Scalar> w3 = w + h / Scalar(2) * a2;
    const Vector3<Scalar> u3 = detail::dexp_inv(th3, w3);
    const Vector3<Scalar> a3 = accel(Matrix3<Scalar>(c * exp_so3(hat(th3))), w3);

    const Vector3<Scalar> th4 = h * u3;
    const Vector3<Scalar> w4 = w + h * a3;
    const Vector3<Scalar> u4 = detail::dexp_inv(th4, w4);
    const Vector3<Scalar> a4 = accel(Matrix3<Scalar>(c * exp_so3(hat(th4))), w4);

    const Vector3<Scalar> theta = h / Scalar(6) * (u1 + Scalar(2) * u2 + Scalar(2) * u3 + u4);
    if (!(theta.norm() <= max_rotation) || !(h * w.norm() <= max_rotation)) {
      throw Error(ErrorCode::StepTooLarge, "a single step would rotate more than pi/4");
    }
    c = c * exp_so3(hat(theta));
    w = w + h / Scalar(6) * (a1 + Scalar(2) * a2 + Scalar(2) * a3 + a4);
    t = t_next;
  }
  return {t_end, c, hat(w)};
}

struct PotentialReport {
  double max_rel_error = 0.0;
  bool passed = true;
};

/// Central-difference check of potential.gradient against potential.value along random
/// tangent directions C exp(eps U) at n_samples random attitudes.
template <typename Scalar>
PotentialReport validate_potential(const PotentialModel<Scalar>& potential, int n_samples = 20,
                                   std::uint64_t seed = 0, double threshold = 1e-5) {
  using std::abs;
  using std::max;
  Rng rng(seed);
  const Scalar eps = Scalar(1e-5);
  PotentialReport report;
  for (int i = 0; i < n_samples; ++i) {
    const Matrix3<Scalar> c = rng.rotation().template cast<Scalar>();
    const Matrix3<Scalar> u = hat(Vector3<Scalar>(rng.unit_vector().template cast<Scalar>()));
    const Scalar plus = potential.value(Matrix3<Scalar>(c * exp_so3(Matrix3<Scalar>(eps * u))));
    const Scalar minus = potential.value(Matrix3<Scalar>(c * exp_so3(Matrix3<Scalar>(-eps * u))));
    const Scalar fd = (plus - minus) / (Scalar(2) * eps);
    const Scalar analytic = trace_inner(potential.gradient(c), Matrix3<Scalar>(c * u));
    const Scalar floor = Scalar(1e-9) * max(Scalar(1), abs(potential.value(c)));
    const double err = static_cast<double>(abs(analytic - fd) / max(abs(fd), floor));
    report.max_rel_error = std::max(report.max_rel_error, err);
  }
  report.passed = report.max_rel_error <= threshold;
  return report;
}

}  // namespace so3est
