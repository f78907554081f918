#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "so3est/dynamics.hpp"
#include "so3est/errors.hpp"
#include "so3est/so3.hpp"
#include "so3est/wahba.hpp"

namespace so3est {

/// Design weights shared by both filters. Delta weighs trust in the propagated attitude,
/// Pi the rate-matching term of the gyro-free filter, Gamma trust in the propagated
/// angular velocity of the gyro filter.
template <typename Scalar>
struct FilterConfig {
  Matrix3<Scalar> Delta = Matrix3<Scalar>::Identity();
  Matrix3<Scalar> Pi = Matrix3<Scalar>::Identity();
  Matrix3<Scalar> Gamma = Matrix3<Scalar>::Identity();
  IntegratorConfig integrator{};
};

template <typename Scalar>
void validate_filter_config(const FilterConfig<Scalar>& cfg) {
  require_symmetric_pd(cfg.Delta, "Delta");
  require_symmetric_pd(cfg.Pi, "Pi");
  require_symmetric_pd(cfg.Gamma, "Gamma");
  validate_integrator(cfg.integrator);
}

/// Vector measurements taken at t, plus the optional gyro sample and its weight X.
template <typename Scalar>
struct MeasurementBatch {
  Scalar t{};
  Matrix3X<Scalar> E;
  Matrix3X<Scalar> B;
  VectorX<Scalar> W;
  std::optional<Matrix3<Scalar>> X;
  std::optional<Matrix3<Scalar>> Omega_meas;
};

template <typename Scalar>
void validate_batch(const MeasurementBatch<Scalar>& batch) {
  if (batch.E.cols() != batch.B.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "batch E and B differ in column count");
  }
  validate_weights(batch.W, batch.E.cols());
  if (!batch.E.allFinite() || !batch.B.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "batch vectors must be finite");
  }
}

/// Propagated (minus) and updated (plus) estimates at one measurement instant.
template <typename Scalar>
struct FilterEstimate {
  Scalar t{};
  Matrix3<Scalar> C_minus;
  Matrix3<Scalar> C_plus;
  Matrix3<Scalar> Omega_minus;
  Matrix3<Scalar> Omega_plus;
};

enum class FilterMode { NoGyro, WithGyro };

/// L_k = C_minus Delta + E_k W_k B_kᵀ.
template <typename Scalar>
AttitudeProfile<Scalar> filter_profile(const Matrix3<Scalar>& c_minus, const MeasurementBatch<Scalar>& batch,
                                       const Matrix3<Scalar>& delta) {
  validate_batch(batch);
  return make_profile(Matrix3<Scalar>(c_minus * delta + batch.E * batch.W.asDiagonal() * batch.B.transpose()));
}

/// Attitude update shared by both filters: the SO(3) minimizer of the batch cost plus
/// the Delta-weighted distance to the propagated attitude.
template <typename Scalar>
Matrix3<Scalar> update_attitude(const Matrix3<Scalar>& c_minus, const MeasurementBatch<Scalar>& batch,
                                const FilterConfig<Scalar>& cfg) {
  return solve_attitude(filter_profile(c_minus, batch, cfg.Delta)).C_hat;
}

/// Gyro-free angular velocity update: the skew Omega_plus solving
///   Omega_plus Pi + Pi Omega_plus = P Omega_minus Pi + Pi Omega_minus Pᵀ,  P = C_plusᵀ C_minus.
/// The right-hand side is skew for any P; a non-finite or symmetric residual above 1e-9
/// means the inputs are inconsistent.
template <typename Scalar>
Matrix3<Scalar> update_omega_no_gyro(const Matrix3<Scalar>& c_minus, const Matrix3<Scalar>& c_plus,
                                     const Matrix3<Scalar>& omega_minus, const Matrix3<Scalar>& pi) {
  using std::max;
  if (!is_symmetric_pd(pi)) throw Error(ErrorCode::InconsistentUpdate, "Pi is not symmetric positive definite");
  const Matrix3<Scalar> p = c_plus.transpose() * c_minus;
  const Matrix3<Scalar> rhs = p * omega_minus * pi + pi * omega_minus * p.transpose();
  const Scalar scale = max(Scalar(1), max_abs(rhs));
  if (!rhs.allFinite() || !(max_abs(symmetric_part(rhs)) <= Scalar(1e-9) * scale)) {
    throw Error(ErrorCode::InconsistentUpdate, "angular velocity update has a symmetric residual");
  }
  return j_solve(pi, skew_part(rhs));
}

/// Gyro angular velocity update: J_{X+Gamma}(Omega_plus) = J_X(Omega_meas) + J_Gamma(Omega_minus).
template <typename Scalar>
Matrix3<Scalar> update_omega_with_gyro(const Matrix3<Scalar>& omega_minus, const Matrix3<Scalar>& omega_meas,
                                       const Matrix3<Scalar>& x, const Matrix3<Scalar>& gamma) {
  require_symmetric_pd(x, "X");
  require_symmetric_pd(gamma, "Gamma");
  return j_solve(Matrix3<Scalar>(x + gamma), Matrix3<Scalar>(j_apply(x, omega_meas) + j_apply(gamma, omega_minus)));
}

/// Optional starting point; a missing attitude is determined from the first batch.
template <typename Scalar>
struct FilterInit {
  std::optional<Matrix3<Scalar>> C0;
  std::optional<Matrix3<Scalar>> Omega0;
};

/// One propagate-then-update cycle from the previous estimate to `batch.t`.
template <typename Scalar>
FilterEstimate<Scalar> filter_step(const FilterEstimate<Scalar>& previous, const MeasurementBatch<Scalar>& batch,
                                   const InertiaSpec<Scalar>& inertia, const PotentialModel<Scalar>& potential,
                                   const FilterConfig<Scalar>& cfg, FilterMode mode) {
  const BodyState<Scalar> start{previous.t, previous.C_plus, previous.Omega_plus};
  const BodyState<Scalar> predicted = propagate(start, inertia, potential, batch.t, cfg.integrator);

  FilterEstimate<Scalar> est;
  est.t = batch.t;
  est.C_minus = predicted.C;
  est.Omega_minus = predicted.Omega;
  est.C_plus = update_attitude(est.C_minus, batch, cfg);
  if (mode == FilterMode::NoGyro) {
    est.Omega_plus = update_omega_no_gyro(est.C_minus, est.C_plus, est.Omega_minus, cfg.Pi);
  } else {
    if (!batch.Omega_meas || !batch.X) throw Error(ErrorCode::MissingGyro, "batch lacks a gyro sample or X");
    est.Omega_plus = update_omega_with_gyro(est.Omega_minus, *batch.Omega_meas, *batch.X, cfg.Gamma);
  }
  return est;
}

/// Runs either filter over time-sorted batches. The first batch only initializes
/// (C0+ = C0-, Omega0+ = Omega0-); every later batch is a propagate/update cycle.
template <typename Scalar>
std::vector<FilterEstimate<Scalar>> run_filter(const FilterInit<Scalar>& init,
                                               const std::vector<MeasurementBatch<Scalar>>& batches,
                                               const InertiaSpec<Scalar>& inertia,
                                               const PotentialModel<Scalar>& potential,
                                               const FilterConfig<Scalar>& cfg, FilterMode mode) {
  validate_filter_config(cfg);
  std::vector<FilterEstimate<Scalar>> out;
  if (batches.empty()) return out;

  for (std::size_t k = 0; k < batches.size(); ++k) {
    validate_batch(batches[k]);
    if (k > 0 && !(batches[k].t > batches[k - 1].t)) {
      throw Error(ErrorCode::InvalidArgument, "batch times must be strictly increasing");
    }
    if (mode == FilterMode::WithGyro && (!batches[k].Omega_meas || !batches[k].X)) {
      throw Error(ErrorCode::MissingGyro, "batch " + std::to_string(k) + " lacks a gyro sample or X");
    }
  }

  const MeasurementBatch<Scalar>& first = batches.front();
  Matrix3<Scalar> c0;
  if (init.C0) {
    require_rotation(*init.C0, "initial attitude");
    c0 = *init.C0;
  } else {
    c0 = solve_attitude(build_profile(first.E, first.W, first.B)).C_hat;
  }
  Matrix3<Scalar> omega0;
  if (init.Omega0) {
    require_skew(*init.Omega0, "initial angular velocity");
    omega0 = *init.Omega0;
  } else if (mode == FilterMode::WithGyro) {
    omega0 = *first.Omega_meas;
  } else {
    throw Error(ErrorCode::InvalidArgument, "the gyro-free filter needs an initial angular velocity");
  }

  out.reserve(batches.size());
  out.push_back({first.t, c0, c0, omega0, omega0});
  for (std::size_t k = 1; k < batches.size(); ++k) {
    out.push_back(filter_step(out.back(), batches[k], inertia, potential, cfg, mode));
  }
  return out;
}

}  // namespace so3est
