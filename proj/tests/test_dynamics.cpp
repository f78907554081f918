#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "so3est/dynamics.hpp"

using namespace so3est;

namespace {

InertiaSpec<double> asymmetric_inertia() {
  // Lambda = diag(1, 2, 3.5)  =>  K = diag(5.5, 4.5, 3)
  return make_inertia(Matrix3d(Vector3d(1.0, 2.0, 3.5).asDiagonal()));
}

double relative_energy_drift(const InertiaSpec<double>& inertia, const BodyState<double>& init, double t_end,
                             double step, int samples) {
  const double e0 = kinetic_energy(inertia, init.Omega);
  const auto zero = zero_potential();
  IntegratorConfig cfg;
  cfg.step = step;
  BodyState<double> s = init;
  double drift = 0.0;
  for (int k = 1; k <= samples; ++k) {
    s = propagate(s, inertia, zero, init.t + t_end * k / samples, cfg);
    drift = std::max(drift, std::abs(kinetic_energy(inertia, s.Omega) - e0) / e0);
  }
  return drift;
}

}  // namespace

TEST(JApply, SpecialCases) {
  Rng rng(31);
  const Matrix3d omega = oracle::random_skew(rng);
  EXPECT_LE(max_abs(Matrix3d(j_apply(make_inertia(Matrix3d::Identity()), omega) - 2.0 * omega)), 1e-15);
  EXPECT_TRUE(j_apply(asymmetric_inertia(), Matrix3d::Zero()).isZero(0.0));
}

TEST(JApply, TraceReductionIdentity) {
  Rng rng(32);
  for (int i = 0; i < 1000; ++i) {
    const Matrix3d lambda = oracle::random_spd(rng);
    const Vector3d w = rng.normal3();
    const Matrix3d direct = lambda * hat(w) + hat(w) * lambda;
    EXPECT_LE(max_abs(Matrix3d(direct - hat(Vector3d(reduction_matrix(lambda) * w)))), 1e-13);
    EXPECT_TRUE(is_skew(j_apply(lambda, hat(w))));
  }
}

TEST(JSolve, SpecialCases) {
  const Matrix3d m = 2.0 * hat(Vector3d(1, 2, 3));
  EXPECT_LE(max_abs(Matrix3d(j_solve(Matrix3d::Identity(), m) - hat(Vector3d(1, 2, 3)))), 1e-15);
  Rng rng(1);
  EXPECT_TRUE(j_solve(oracle::random_spd(rng), Matrix3d::Zero()).isZero(0.0));
}

TEST(JSolve, InvertsJApplyAndMatchesKroneckerSystem) {
  Rng rng(33);
  for (int i = 0; i < 1000; ++i) {
    const Matrix3d k = oracle::random_spd(rng, 0.1, 10.0);
    const Matrix3d omega = oracle::random_skew(rng, 2.0);
    const Matrix3d m = k * omega + omega * k;
    const Matrix3d solved = j_solve(k, m);
    EXPECT_LE(max_abs(Matrix3d(solved - omega)), 1e-11);
    EXPECT_LE(max_abs(Matrix3d(solved - oracle::sylvester_kron(k, m))), 1e-11);
  }
}

TEST(JSolve, RejectsNonSkewRightHandSide) {
  EXPECT_THROW(j_solve(Matrix3d::Identity(), Matrix3d::Identity()), Error);
}

TEST(Inertia, ClassicalTensorIsPositiveDefinite) {
  Rng rng(34);
  for (int i = 0; i < 100; ++i) {
    const auto inertia = make_inertia(oracle::random_spd(rng, 0.01, 5.0));
    EXPECT_TRUE(is_symmetric_pd(inertia.K));
  }
  EXPECT_THROW(make_inertia(Matrix3d(Vector3d(1, -1, 1).asDiagonal())), Error);
}

TEST(EulerRhs, IsotropicFreeBodySpinsUniformly) {
  const auto inertia = make_inertia(Matrix3d(2.5 * Matrix3d::Identity()));
  Rng rng(35);
  const BodyState<double> s{0.0, rng.rotation(), oracle::random_skew(rng)};
  const auto d = euler_rhs(s, inertia, zero_potential());
  EXPECT_LE(max_abs(d.Omega_dot), 1e-15);
  EXPECT_LE(max_abs(Matrix3d(d.C_dot - s.C * s.Omega)), 0.0);
}

TEST(EulerRhs, MatchesClassicalEulerEquations) {
  Rng rng(36);
  for (int i = 0; i < 1000; ++i) {
    const auto inertia = make_inertia(Matrix3d(Vector3d(rng.uniform(0.2, 3), rng.uniform(0.2, 3), rng.uniform(0.2, 3)).asDiagonal()));
    const BodyState<double> s{0.0, rng.rotation(), oracle::random_skew(rng)};
    const Vector3d expected = oracle::classical_euler(inertia.K, vee(s.Omega));
    EXPECT_LE(max_abs(Vector3d(vee(euler_rhs(s, inertia, zero_potential()).Omega_dot) - expected)), 1e-12);
  }
}

TEST(EulerRhs, LinearPotentialMoment) {
  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const auto inertia = make_inertia(oracle::random_spd(rng));
    Matrix3d a;
    for (int c = 0; c < 3; ++c) a.col(c) = rng.normal3();
    const BodyState<double> s{0.0, rng.rotation(), oracle::random_skew(rng)};
    const Matrix3d moment = a.transpose() * s.C - s.C.transpose() * a;
    EXPECT_TRUE(is_skew(moment));
    const Vector3d expected = oracle::classical_euler(inertia.K, vee(s.Omega), vee(moment));
    EXPECT_LE(max_abs(Vector3d(vee(euler_rhs(s, inertia, linear_potential(a)).Omega_dot) - expected)), 1e-12);
  }
}

TEST(EulerRhs, BadGradientIsReported) {
  PotentialModel<double> bad{[](const Matrix3d&) { return 0.0; },
                             [](const Matrix3d&) {
                               Matrix3d g = Matrix3d::Zero();
                               g(0, 0) = std::numeric_limits<double>::quiet_NaN();
                               return g;
                             }};
  const BodyState<double> s{0.0, Matrix3d::Identity(), Matrix3d::Zero()};
  try {
    euler_rhs(s, asymmetric_inertia(), bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PotentialGradientNotSkewCompatible);
  }
}

TEST(Propagate, IsotropicSpinIsAnalytic) {
  const auto inertia = make_inertia(Matrix3d::Identity());
  Rng rng(38);
  const Matrix3d c0 = rng.rotation();
  const BodyState<double> s{0.0, c0, hat(Vector3d(0, 0, 1))};
  const auto out = propagate(s, inertia, zero_potential(), std::numbers::pi / 2);
  EXPECT_LE(max_abs(Matrix3d(out.C - c0 * exp_so3(hat(Vector3d(0, 0, std::numbers::pi / 2))))), 1e-9);
  EXPECT_DOUBLE_EQ(out.t, std::numbers::pi / 2);
}

TEST(Propagate, ZeroSpanReturnsInput) {
  const BodyState<double> s{1.0, Matrix3d::Identity(), hat(Vector3d(1, 2, 3))};
  const auto out = propagate(s, asymmetric_inertia(), zero_potential(), 1.0);
  EXPECT_EQ(out.C, s.C);
  EXPECT_EQ(out.Omega, s.Omega);
}

TEST(Propagate, PartialFinalStepEndsExactly) {
  const BodyState<double> s{0.0, Matrix3d::Identity(), hat(Vector3d(0.3, -0.2, 1.0))};
  const auto out = propagate(s, asymmetric_inertia(), zero_potential(), 0.0105);
  EXPECT_EQ(out.t, 0.0105);
  // Same result as taking the short step explicitly afterwards.
  const auto a = propagate(s, asymmetric_inertia(), zero_potential(), 0.010);
  const auto b = propagate(a, asymmetric_inertia(), zero_potential(), 0.0105);
  EXPECT_LE(max_abs(Matrix3d(out.C - b.C)), 1e-15);
}

TEST(Propagate, Errors) {
  const BodyState<double> s{0.0, Matrix3d::Identity(), hat(Vector3d(0, 0, 1000.0))};
  try {
    propagate(s, asymmetric_inertia(), zero_potential(), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepTooLarge);
  }
  EXPECT_THROW(propagate(s, asymmetric_inertia(), zero_potential(), -1.0), Error);
  IntegratorConfig bad;
  bad.step = 0.0;
  EXPECT_THROW(propagate(s, asymmetric_inertia(), zero_potential(), 1.0, bad), Error);
  bad.step = 1e-3;
  bad.scheme = "euler";
  EXPECT_THROW(propagate(s, asymmetric_inertia(), zero_potential(), 1.0, bad), Error);
}

TEST(Propagate, ConservesEnergyAndSpatialMomentum) {
  const auto inertia = asymmetric_inertia();
  const BodyState<double> s{0.0, Matrix3d::Identity(), hat(Vector3d(0.4, 1.1, -0.7))};
  const double e0 = kinetic_energy(inertia, s.Omega);
  const Matrix3d pi0 = spatial_momentum(inertia, s.C, s.Omega);
  BodyState<double> cur = s;
  for (int k = 1; k <= 100; ++k) {
    cur = propagate(cur, inertia, zero_potential(), 0.1 * k);
    EXPECT_LE(std::abs(kinetic_energy(inertia, cur.Omega) - e0) / e0, 1e-8);
    EXPECT_LE(max_abs(Matrix3d(spatial_momentum(inertia, cur.C, cur.Omega) - pi0)) / max_abs(pi0), 1e-8);
    EXPECT_TRUE(is_rotation(cur.C));
    EXPECT_TRUE(is_skew(cur.Omega));
  }
}

TEST(Propagate, FourthOrderConvergence) {
  const auto inertia = asymmetric_inertia();
  const BodyState<double> s{0.0, Matrix3d::Identity(), hat(Vector3d(0.4, 1.1, -0.7))};
  IntegratorConfig fine;
  fine.step = 1e-4;
  const auto ref = propagate(s, inertia, zero_potential(), 2.0, fine);
  const auto error_at = [&](double h) {
    IntegratorConfig cfg;
    cfg.step = h;
    const auto out = propagate(s, inertia, zero_potential(), 2.0, cfg);
    return max_abs(Matrix3d(out.C - ref.C)) + max_abs(Matrix3d(out.Omega - ref.Omega));
  };
  const double e1 = error_at(0.04);
  const double e2 = error_at(0.02);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Propagate, OrthogonalityOverManySteps) {
  const auto inertia = asymmetric_inertia();
  const BodyState<double> s{0.0, Matrix3d::Identity(), hat(Vector3d(2.0, -1.0, 3.0))};
  const auto out = propagate(s, inertia, zero_potential(), 10.0);  // 1e4 steps
  EXPECT_LE(max_abs(Matrix3d(out.C.transpose() * out.C - Matrix3d::Identity())), 1e-9);
  EXPECT_NEAR(out.C.determinant(), 1.0, 1e-9);
}

TEST(Propagate, TimeReversal) {
  const auto inertia = asymmetric_inertia();
  Rng rng(39);
  const BodyState<double> s{0.0, rng.rotation(), hat(Vector3d(0.5, -1.2, 0.8))};
  const auto fwd = propagate(s, inertia, zero_potential(), 3.0);
  const BodyState<double> rev{0.0, fwd.C, Matrix3d(-fwd.Omega)};
  const auto back = propagate(rev, inertia, zero_potential(), 3.0);
  EXPECT_LE(max_abs(Matrix3d(back.C - s.C)), 1e-7);
  EXPECT_LE(max_abs(Matrix3d(back.Omega + s.Omega)), 1e-7);
}

TEST(Propagate, HalvingStepShrinksEnergyDrift) {
  const auto inertia = asymmetric_inertia();
  const BodyState<double> s{0.0, Matrix3d::Identity(), hat(Vector3d(0.4, 1.1, -0.7))};
  const double d1 = relative_energy_drift(inertia, s, 10.0, 2e-2, 100);
  const double d2 = relative_energy_drift(inertia, s, 10.0, 1e-2, 100);
  EXPECT_GE(d1 / d2, 8.0);
}

TEST(Propagate, GravityGradientKeepsTotalEnergy) {
  const auto inertia = asymmetric_inertia();
  const auto potential = gravity_gradient_potential(0.5, Vector3d(0, 0, 1), inertia);
  Rng rng(40);
  BodyState<double> s{0.0, rng.rotation(), hat(Vector3d(0.3, -0.2, 0.5))};
  const double h0 = kinetic_energy(inertia, s.Omega) + potential.value(s.C);
  s = propagate(s, inertia, potential, 5.0);
  const double h1 = kinetic_energy(inertia, s.Omega) + potential.value(s.C);
  EXPECT_LE(std::abs(h1 - h0) / std::abs(h0), 1e-9);
}

TEST(ValidatePotential, Reports) {
  EXPECT_EQ(validate_potential(zero_potential()).max_rel_error, 0.0);
  EXPECT_TRUE(validate_potential(zero_potential()).passed);

  Matrix3d a;
  a << 0.3, -1.2, 0.5, 2.0, 0.1, -0.7, 0.4, 0.9, -1.5;
  const auto linear = validate_potential(linear_potential(a));
  EXPECT_LE(linear.max_rel_error, 1e-6);
  EXPECT_TRUE(linear.passed);

  PotentialModel<double> wrong{[a](const Matrix3d& c) { return trace_inner(a, c); },
                               [a](const Matrix3d&) { return Matrix3d(2.0 * a); }};
  const auto bad = validate_potential(wrong);
  EXPECT_FALSE(bad.passed);
  EXPECT_NEAR(bad.max_rel_error, 1.0, 1e-4);

  EXPECT_TRUE(validate_potential(gravity_gradient_potential(0.8, Vector3d(1, 2, 3), asymmetric_inertia())).passed);
}
