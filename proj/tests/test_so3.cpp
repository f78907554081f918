#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "so3est/cli/star_tracker_example.hpp"
#include "so3est/so3.hpp"

using namespace so3est;

TEST(Hat, ZeroAndBasis) {
  EXPECT_TRUE(hat(Vector3d::Zero()).isZero(0.0));
  Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  EXPECT_EQ(hat(Vector3d(0, 0, 1)), expected);
}

TEST(Hat, MatchesCrossProduct) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Vector3d v = rng.normal3();
    const Vector3d w = rng.normal3();
    EXPECT_LE(max_abs(Vector3d(hat(v) * w - v.cross(w))), 1e-15);
  }
}

TEST(Vee, InvertsHat) {
  EXPECT_TRUE(vee(Matrix3d::Zero()).isZero(0.0));
  EXPECT_EQ(vee(hat(Vector3d(1, 2, 3))), Vector3d(1, 2, 3));
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Matrix3d x = oracle::random_skew(rng, 5.0);
    EXPECT_LE(max_abs(Matrix3d(hat(vee(x)) - x)), 1e-15);
    const Vector3d v = rng.normal3();
    EXPECT_EQ(vee(hat(v)), v);
  }
}

TEST(Vee, RejectsNonSkew) {
  Matrix3d x = hat(Vector3d(1, 2, 3));
  x(0, 1) += 1e-6;
  try {
    vee(x);
    FAIL() << "expected NotSkew";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSkew);
  }
}

TEST(ExpSo3, SpecialValues) {
  EXPECT_EQ(exp_so3(Matrix3d::Zero()), Matrix3d::Identity());
  const Matrix3d r = exp_so3(hat(Vector3d(0, 0, std::numbers::pi / 2)));
  EXPECT_LE(max_abs(Vector3d(r.col(0) - Vector3d(0, 1, 0))), 1e-15);
  EXPECT_LE(max_abs(Vector3d(r.col(2) - Vector3d(0, 0, 1))), 1e-15);
}

TEST(ExpSo3, AgreesWithPowerSeries) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const Matrix3d x = hat(Vector3d(rng.unit_vector() * rng.uniform(0.0, 2.0)));
    EXPECT_LE(max_abs(Matrix3d(exp_so3(x) - oracle::exp_series(x, 30))), 1e-12);
  }
  // small-angle branch
  const Matrix3d tiny = hat(Vector3d(3e-7, -2e-7, 1e-7));
  EXPECT_LE(max_abs(Matrix3d(exp_so3(tiny) - oracle::exp_series(tiny))), 1e-15);
}

TEST(ExpSo3, PropertiesUpToNormTen) {
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Matrix3d x = hat(Vector3d(rng.unit_vector() * rng.uniform(0.0, 10.0)));
    const Matrix3d r = exp_so3(x);
    EXPECT_TRUE(is_rotation(r, 1e-12));
    EXPECT_LE(max_abs(Matrix3d(exp_so3(Matrix3d(-x)) - r.transpose())), 1e-12);
  }
}

TEST(TraceInner, Values) {
  EXPECT_DOUBLE_EQ(trace_inner(Matrix3d::Identity(), Matrix3d::Identity()), 3.0);
  EXPECT_DOUBLE_EQ(trace_inner(Matrix3d::Zero(), Matrix3d::Zero()), 0.0);
  Rng rng(5);
  Matrix3Xd a(3, 6), b(3, 6);
  for (int j = 0; j < 6; ++j) {
    a.col(j) = rng.normal3();
    b.col(j) = rng.normal3();
  }
  double sum = 0.0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 6; ++c) sum += a(r, c) * b(r, c);
  EXPECT_NEAR(trace_inner(a, b), sum, 1e-14);
  EXPECT_NEAR(trace_inner(a, b), (a.transpose() * b).trace(), 1e-13);
  EXPECT_NEAR(trace_inner(a, b), trace_inner(b, a), 0.0);
  EXPECT_GE(trace_inner(a, a), 0.0);
}

TEST(TraceInner, ShapeMismatch) {
  const Matrix3Xd a = Matrix3Xd::Zero(3, 4);
  const Matrix3Xd b = Matrix3Xd::Zero(3, 5);
  EXPECT_THROW(trace_inner(a, b), Error);
}

TEST(TraceInner, SkewPairsAreTwiceTheDotProduct) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const Vector3d x = rng.normal3();
    const Vector3d y = rng.normal3();
    EXPECT_NEAR(trace_inner(hat(x), hat(y)), 2.0 * x.dot(y), 1e-13);
  }
}

TEST(PrincipalAngle, Values) {
  Rng rng(7);
  const Matrix3d c = rng.rotation();
  EXPECT_NEAR(principal_angle(c, c), 0.0, 1e-15);
  EXPECT_NEAR(principal_angle(Matrix3d::Identity(), exp_so3(hat(Vector3d(1e-9, 0, 0)))), 1e-9, 1e-20);
  EXPECT_NEAR(principal_angle(Matrix3d::Identity(), exp_so3(hat(Vector3d(0, std::numbers::pi, 0)))), std::numbers::pi, 1e-12);
  for (double theta : {0.1, 1.0, 2.0, 3.0}) {
    // arccos((trace - 1) / 2) as a second route
    const Matrix3d r = exp_so3(hat(Vector3d(theta * Vector3d(1, -2, 2).normalized())));
    EXPECT_NEAR(principal_angle(Matrix3d::Identity(), r), std::acos((r.trace() - 1.0) / 2.0), 1e-12);
    EXPECT_NEAR(principal_angle(Matrix3d::Identity(), exp_so3(hat(Vector3d(0, 0, theta)))), theta, 1e-12);
  }
}

TEST(PrincipalAngle, SymmetricAndTriangle) {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const Matrix3d a = rng.rotation();
    const Matrix3d b = rng.rotation();
    const Matrix3d c = rng.rotation();
    EXPECT_NEAR(principal_angle(a, b), principal_angle(b, a), 1e-12);
    EXPECT_LE(principal_angle(a, c), principal_angle(a, b) + principal_angle(b, c) + 1e-9);
  }
}

TEST(PrincipalAngle, PublishedExampleErrorMagnitude) {
  namespace ex = star_tracker_example;
  // The printed matrices are 4-decimal roundings, so project C_hatᵀ C back onto SO(3).
  const Matrix3d product = oracle::procrustes(ex::published_estimate().transpose() * ex::true_attitude());
  const double angle = principal_angle(product, Matrix3d::Identity());
  EXPECT_GT(angle, 1.0e-3);
  EXPECT_LT(angle, 2.0e-3);
  // The published e_C itself: vee of its skew part has the same magnitude.
  const Vector3d axis = vee(skew_part(ex::published_error()));
  EXPECT_NEAR(angle, axis.norm(), 2e-4);
}

TEST(Validation, Predicates) {
  EXPECT_TRUE(is_rotation(Matrix3d::Identity()));
  EXPECT_FALSE(is_rotation(Matrix3d(-Matrix3d::Identity())));
  EXPECT_FALSE(is_rotation(Matrix3d(1.001 * Matrix3d::Identity())));
  EXPECT_TRUE(is_symmetric_pd(Matrix3d::Identity()));
  EXPECT_FALSE(is_symmetric_pd(Matrix3d(Vector3d(1, 1, -1).asDiagonal())));
  Matrix3d asym = Matrix3d::Identity();
  asym(0, 1) = 0.1;
  EXPECT_FALSE(is_symmetric_pd(asym));
  EXPECT_TRUE(is_skew(hat(Vector3d(1, 2, 3))));
  EXPECT_FALSE(is_skew(Matrix3d::Identity()));
}
