#pragma once

// Implicit 4D cavity shapes: the 4-ball and the three 4D tori
// S^1 x B^3, S^2 x B^2 and S^1 x S^1 x B^2, all expressed in a local
// (centered, unrotated) frame with coordinates (x, y, z, w).

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "toxel/error.hpp"

namespace toxel {

using Vec4 = std::array<double, 4>;
using Rng = std::mt19937_64;

enum class ShapeKind { Ball4 = 0, TorusS1B3 = 1, TorusS2B2 = 2, TorusT2B2 = 3 };

inline constexpr std::array<ShapeKind, 4> kAllShapeKinds{
    ShapeKind::Ball4, ShapeKind::TorusS1B3, ShapeKind::TorusS2B2,
    ShapeKind::TorusT2B2};

inline std::string_view kind_name(ShapeKind k) {
  switch (k) {
    case ShapeKind::Ball4: return "ball4";
    case ShapeKind::TorusS1B3: return "torus_s1b3";
    case ShapeKind::TorusS2B2: return "torus_s2b2";
    case ShapeKind::TorusT2B2: return "torus_t2b2";
  }
  return "unknown";
}

inline std::optional<ShapeKind> parse_kind(std::string_view s) {
  for (ShapeKind k : kAllShapeKinds) {
    if (kind_name(k) == s) return k;
  }
  return std::nullopt;
}

/// Major radius of the S^1 x S^1 x B^2 cavity as a function of its tilt:
/// 2a at alpha = 0 growing to 4a at alpha = pi/2.
inline double t2b2_major_radius(double a, double alpha) {
  return 2.0 * a * (1.0 + std::sin(alpha));
}

struct ShapeSpec {
  ShapeKind kind = ShapeKind::Ball4;
  double a = 1.0;      // tube or ball radius
  double R = 0.0;      // major radius
  double r = 0.0;      // middle radius (S^1 x S^1 x B^2 only)
  double alpha = 0.0;  // tilt of the S^1 x B^2 factor (S^1 x S^1 x B^2 only)

  static ShapeSpec ball4(double a) { return {ShapeKind::Ball4, a, 0.0, 0.0, 0.0}; }
  static ShapeSpec torus_s1b3(double a) {
    return {ShapeKind::TorusS1B3, a, 2.0 * a, 0.0, 0.0};
  }
  static ShapeSpec torus_s2b2(double a) {
    return {ShapeKind::TorusS2B2, a, 2.0 * a, 0.0, 0.0};
  }
  static ShapeSpec torus_t2b2(double a, double alpha) {
    return {ShapeKind::TorusT2B2, a, t2b2_major_radius(a, alpha), 2.0 * a, alpha};
  }
  static ShapeSpec canonical(ShapeKind k, double a, double alpha = 0.0) {
    switch (k) {
      case ShapeKind::Ball4: return ball4(a);
      case ShapeKind::TorusS1B3: return torus_s1b3(a);
      case ShapeKind::TorusS2B2: return torus_s2b2(a);
      case ShapeKind::TorusT2B2: return torus_t2b2(a, alpha);
    }
    return ball4(a);
  }

  /// Checks the parameter coupling used for generated cavities.
  void validate(double tol = 1e-9) const {
    if (!(a > 0.0)) throw ParameterError("shape radius a must be positive");
    auto near = [tol](double x, double y) { return std::abs(x - y) <= tol * (1.0 + std::abs(y)); };
    switch (kind) {
      case ShapeKind::Ball4:
        if (R != 0.0 || r != 0.0) throw ParameterError("ball4 requires R = r = 0");
        break;
      case ShapeKind::TorusS1B3:
      case ShapeKind::TorusS2B2:
        if (!near(R, 2.0 * a)) throw ParameterError("torus requires R = 2a");
        break;
      case ShapeKind::TorusT2B2:
        if (alpha < 0.0 || alpha > std::numbers::pi / 2 + tol)
          throw ParameterError("alpha must lie in [0, pi/2]");
        if (!near(r, 2.0 * a)) throw ParameterError("torus_t2b2 requires r = 2a");
        if (R < 2.0 * a * (1 - tol) || R > 4.0 * a * (1 + tol))
          throw ParameterError("torus_t2b2 requires R in [2a, 4a]");
        break;
    }
  }
};

/// Implicit inequality test; points on the boundary are members.
inline bool membership(const ShapeSpec& s, const Vec4& p) {
  const double x = p[0], y = p[1], z = p[2], w = p[3];
  const double a2 = s.a * s.a;
  switch (s.kind) {
    case ShapeKind::Ball4:
      return x * x + y * y + z * z + w * w <= a2;
    case ShapeKind::TorusS1B3: {
      const double d = std::sqrt(x * x + y * y) - s.R;
      return d * d + z * z + w * w <= a2;
    }
    case ShapeKind::TorusS2B2: {
      const double d = std::sqrt(x * x + y * y + z * z) - s.R;
      return d * d + w * w <= a2;
    }
    case ShapeKind::TorusT2B2: {
      const double A = std::cos(s.alpha);
      const double B = std::sin(s.alpha);
      const double u = std::sqrt(x * x + y * y) - s.R;
      const double p1 = B * u - A * w;
      const double d = std::sqrt(p1 * p1 + z * z) - s.r;
      const double q = A * u + B * w;
      return d * d + q * q <= a2;
    }
  }
  return false;
}

inline double hypervolume(const ShapeSpec& s) {
  constexpr double pi = std::numbers::pi;
  const double a = s.a;
  switch (s.kind) {
    case ShapeKind::Ball4: return pi * pi / 2.0 * a * a * a * a;
    case ShapeKind::TorusS1B3: return 8.0 / 3.0 * pi * pi * s.R * a * a * a;
    case ShapeKind::TorusS2B2: return 4.0 * pi * pi * s.R * s.R * a * a;
    case ShapeKind::TorusT2B2: return 4.0 * pi * pi * pi * s.R * s.r * a * a;
  }
  return 0.0;
}

/// Radius rho with membership(s, p) => |p| <= rho.
inline double bounding_radius(const ShapeSpec& s) {
  switch (s.kind) {
    case ShapeKind::Ball4: return s.a;
    case ShapeKind::TorusS1B3:
    case ShapeKind::TorusS2B2: return s.R + s.a;
    case ShapeKind::TorusT2B2: return s.R + s.r + s.a;
  }
  return 0.0;
}

struct RadiusRanges {
  double a_min = 2.4;
  double a_max = 6.4;

  void validate() const {
    if (!(a_min > 0.0) || !(a_max >= a_min)) {
      throw ParameterError("radius range requires 0 < a_min <= a_max");
    }
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Interval for the sampled `a` parameter of each kind. The B^2 range of
/// S^1 x S^1 x B^2 is taken directly; the others are rescaled so their
/// hypervolumes span [16 pi^3 a_min^4, 32 pi^3 a_max^4].
inline Interval radius_interval(ShapeKind kind, double a_min, double a_max) {
  RadiusRanges{a_min, a_max}.validate();
  constexpr double pi = std::numbers::pi;
  const auto root4 = [](double v) { return std::sqrt(std::sqrt(v)); };
  switch (kind) {
    case ShapeKind::Ball4: return {2.0 * root4(2 * pi) * a_min, 2.0 * root4(4 * pi) * a_max};
    case ShapeKind::TorusS1B3: return {root4(3 * pi) * a_min, root4(6 * pi) * a_max};
    case ShapeKind::TorusS2B2: return {root4(pi) * a_min, root4(2 * pi) * a_max};
    case ShapeKind::TorusT2B2: return {a_min, a_max};
  }
  return {a_min, a_max};
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline ShapeSpec sample_shape(Rng& rng, ShapeKind kind, const RadiusRanges& ranges) {
  const Interval iv = radius_interval(kind, ranges.a_min, ranges.a_max);
  const double a = uniform(rng, iv.lo, iv.hi);
  double alpha = 0.0;
  if (kind == ShapeKind::TorusT2B2) alpha = uniform(rng, 0.0, std::numbers::pi / 2);
  return ShapeSpec::canonical(kind, a, alpha);
}

}  // namespace toxel
