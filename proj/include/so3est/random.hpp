#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

#include "so3est/so3.hpp"

namespace so3est {

/// Seeded random stream.
///
/// The engine (mt19937_64) and seed_seq are fully specified by the standard, and the
/// Gaussian transform is done here rather than with std::normal_distribution, whose
/// algorithm is implementation-defined. Streams are therefore reproducible bit for bit
/// across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(make_engine({seed})) {}

  /// Independent stream for (seed, stream index), e.g. one per Monte-Carlo trial.
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(make_engine({seed, stream})) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal variate (Marsaglia polar method).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  Vector3d normal3() {
    const double x = normal();
    const double y = normal();
    const double z = normal();
    return {x, y, z};
  }

  /// Uniformly distributed point on the unit sphere.
  Vector3d unit_vector() {
    Vector3d v;
    do {
      v = normal3();
    } while (v.norm() < 1e-12);
    return v.normalized();
  }

  /// Haar-uniform rotation (uniform axis, angle density proportional to 1 - cos).
  Matrix3d rotation() {
    // Uniform unit quaternion mapped to a rotation matrix; only used as a sampler.
    double q[4];
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (double& c : q) {
        c = normal();
        n2 += c * c;
      }
    } while (n2 < 1e-24);
    const double inv = 1.0 / std::sqrt(n2);
    const double w = q[0] * inv, x = q[1] * inv, y = q[2] * inv, z = q[3] * inv;
    Matrix3d c;
    c << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return c;
  }

  /// Uniformly distributed direction inside a cone of the given half-angle.
  Vector3d cone_vector(const Vector3d& axis, double half_angle) {
    const Vector3d a = axis.normalized();
    Vector3d t = a.unitOrthogonal();
    const Vector3d u = a.cross(t);
    const double cos_max = std::cos(half_angle);
    const double c = 1.0 - uniform() * (1.0 - cos_max);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double phi = 2.0 * std::numbers::pi * uniform();
    return c * a + s * (std::cos(phi) * t + std::sin(phi) * u);
  }

  std::mt19937_64& engine() { return engine_; }

private:
  static std::mt19937_64 make_engine(std::initializer_list<std::uint64_t> words) {
    std::vector<std::uint32_t> parts;
    for (std::uint64_t w : words) {
      parts.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
      parts.push_back(static_cast<std::uint32_t>(w >> 32));
    }
    std::seed_seq seq(parts.begin(), parts.end());
    return std::mt19937_64(seq);
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace so3est
