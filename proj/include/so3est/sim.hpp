#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "so3est/dynamics.hpp"
#include "so3est/filters.hpp"
#include "so3est/random.hpp"
#include "so3est/so3.hpp"
#include "so3est/wahba.hpp"

namespace so3est {

struct NoiseSpec {
  double sigma_vec = 0.0;   // rad, per axis
  double sigma_gyro = 0.0;  // rad/s, per axis
  std::uint64_t seed = 0;
};

inline void validate_noise(const NoiseSpec& noise) {
  if (!(noise.sigma_vec >= 0.0) || !(noise.sigma_gyro >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "noise standard deviations must be non-negative");
  }
}

/// Everything needed to synthesize a truth trajectory and its measurements.
template <typename Scalar>
struct ScenarioSpec {
  Matrix3X<Scalar> E;
  VectorX<Scalar> W;
  InertiaSpec<Scalar> inertia;
  PotentialModel<Scalar> potential;
  BodyState<Scalar> init;
  std::vector<Scalar> schedule;
  NoiseSpec noise;
  /// Gyro weight X_k attached to every generated batch.
  Matrix3<Scalar> gyro_weight = Matrix3<Scalar>::Identity();
  IntegratorConfig integrator{};
};

template <typename Scalar>
void validate_scenario(const ScenarioSpec<Scalar>& scn) {
  validate_vector_set(scn.E, false, "inertial references");
  validate_weights(scn.W, scn.E.cols());
  validate_noise(scn.noise);
  require_rotation(scn.init.C, "initial attitude");
  require_skew(scn.init.Omega, "initial angular velocity");
  for (std::size_t k = 0; k < scn.schedule.size(); ++k) {
    if (k == 0 ? !(scn.schedule[0] >= scn.init.t) : !(scn.schedule[k] > scn.schedule[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "schedule must be strictly increasing and start after init.t");
    }
  }
}

/// True states at every scheduled time, integrated segment by segment with the same
/// integrator the filters use.
template <typename Scalar>
std::vector<BodyState<Scalar>> gen_truth(const ScenarioSpec<Scalar>& scn) {
  validate_scenario(scn);
  std::vector<BodyState<Scalar>> out;
  out.reserve(scn.schedule.size());
  BodyState<Scalar> state = scn.init;
  for (Scalar t : scn.schedule) {
    state = propagate(state, scn.inertia, scn.potential, t, scn.integrator);
    out.push_back(state);
  }
  return out;
}

/// b_i = normalize(Cᵀ e_i + nu_i), nu_i ~ N(0, sigma_vec^2 I).
template <typename Scalar>
Matrix3X<Scalar> gen_vector_measurements(const BodyState<Scalar>& state, const Matrix3X<Scalar>& e,
                                         const NoiseSpec& noise, Rng& rng) {
  Matrix3X<Scalar> b = state.C.transpose() * e;
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    if (noise.sigma_vec > 0.0) b.col(i) += (Scalar(noise.sigma_vec) * rng.normal3().template cast<Scalar>());
    b.col(i).normalize();
  }
  return b;
}

/// Omega + hat(p), p ~ N(0, sigma_gyro^2 I).
template <typename Scalar>
Matrix3<Scalar> gen_gyro_measurement(const Matrix3<Scalar>& omega, const NoiseSpec& noise, Rng& rng) {
  if (noise.sigma_gyro == 0.0) return omega;
  return omega + hat(Vector3<Scalar>(Scalar(noise.sigma_gyro) * rng.normal3().template cast<Scalar>()));
}

/// n unit directions drawn uniformly inside a cone, mimicking a narrow field of view.
inline Matrix3Xd cone_references(const Vector3d& axis, double half_angle, int n, Rng& rng) {
  Matrix3Xd e(3, n);
  for (int i = 0; i < n; ++i) e.col(i) = rng.cone_vector(axis, half_angle);
  return e;
}

/// One measurement batch per truth state; gyro samples are included when requested.
template <typename Scalar>
std::vector<MeasurementBatch<Scalar>> simulate_batches(const ScenarioSpec<Scalar>& scn,
                                                       const std::vector<BodyState<Scalar>>& truth,
                                                       Rng& rng, bool with_gyro) {
  std::vector<MeasurementBatch<Scalar>> out;
  out.reserve(truth.size());
  for (const auto& state : truth) {
    MeasurementBatch<Scalar> batch;
    batch.t = state.t;
    batch.E = scn.E;
    batch.W = scn.W;
    batch.B = gen_vector_measurements(state, scn.E, scn.noise, rng);
    if (with_gyro) {
      batch.Omega_meas = gen_gyro_measurement(state.Omega, scn.noise, rng);
      batch.X = scn.gyro_weight;
    }
    out.push_back(std::move(batch));
  }
  return out;
}

}  // namespace so3est
