#pragma once

#include "so3est/so3.hpp"

// Published seven-vector star-tracker example, 4-decimal values as printed.
namespace so3est::star_tracker_example {

inline Matrix3Xd inertial() {
  Matrix3Xd e(3, 7);
  e << 0.3817, 0.3077, 0.2324, 0.3374, 0.3161, 0.2975, 0.2807,
       -0.5450, -0.6045, -0.5824, -0.5675, -0.6582, -0.6046, -0.5912,
       0.7465, 0.7347, 0.7789, 0.7511, 0.6832, 0.7389, 0.7561;
  return e;
}

inline Matrix3Xd measured() {
  Matrix3Xd b(3, 7);
  b << 0.1287, 0.0975, 0.1580, 0.1264, 0.0210, 0.1020, 0.1249,
       -0.9628, -0.9843, -0.9833, -0.9750, -0.9904, -0.9829, -0.9836,
       -0.2394, -0.1517, -0.0862, -0.1904, -0.1414, -0.1404, -0.1279;
  return b;
}

inline Matrix3d true_attitude() {
  Matrix3d c;
  c << -0.2029, -0.1865, -0.9613,
       0.6385, 0.7191, -0.2743,
       0.7424, -0.6694, -0.0269;
  return c;
}

inline Matrix3d published_estimate() {
  Matrix3d c;
  c << -0.2042, -0.1856, -0.9612,
       0.6386, 0.7190, -0.2745,
       0.7420, -0.6698, -0.0283;
  return c;
}

/// Published e_C = C_hatᵀ C - I.
inline Matrix3d published_error() {
  Matrix3d e;
  e << -0.0000, 0.0006, 0.0012,
       -0.0006, -0.0000, -0.0008,
       -0.0012, 0.0008, -0.0000;
  return e;
}

/// Entrywise tolerance for reproducing the estimate from 4-decimal inputs.
inline constexpr double kGoldenTolerance = 2e-3;
inline constexpr double kSigma = 0.002;

}  // namespace so3est::star_tracker_example
