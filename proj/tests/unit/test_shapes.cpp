#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "toxel/shapes.hpp"

using namespace toxel;

namespace {

constexpr double kPi = std::numbers::pi;

double norm(const Vec4& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]); }

ShapeSpec t2b2(double a, double r, double R, double alpha) {
  ShapeSpec s;
  s.kind = ShapeKind::TorusT2B2;
  s.a = a;
  s.r = r;
  s.R = R;
  s.alpha = alpha;
  return s;
}

}  // namespace

TEST(Shapes, BallCenterAndBoundary) {
  const auto b = ShapeSpec::ball4(3);
  EXPECT_TRUE(membership(b, {0, 0, 0, 0}));
  EXPECT_TRUE(membership(b, {3, 0, 0, 0}));
  EXPECT_FALSE(membership(b, {3.0001, 0, 0, 0}));
  EXPECT_TRUE(membership(b, {0, 0, 0, -3}));
}

TEST(Shapes, SolidTorusCoreAndAxis) {
  const auto t = ShapeSpec::torus_s1b3(2);
  ASSERT_DOUBLE_EQ(t.R, 4);
  EXPECT_TRUE(membership(t, {4, 0, 0, 0}));
  EXPECT_TRUE(membership(t, {0, -4, 0, 0}));
  EXPECT_FALSE(membership(t, {0, 0, 0, 0}));
  EXPECT_TRUE(membership(t, {6, 0, 0, 0}));
  EXPECT_FALSE(membership(t, {6.01, 0, 0, 0}));
  EXPECT_TRUE(membership(t, {4, 0, 2, 0}));
}

TEST(Shapes, SphericalTorus) {
  const auto t = ShapeSpec::torus_s2b2(1.5);
  EXPECT_TRUE(membership(t, {0, 0, 3, 0}));
  EXPECT_TRUE(membership(t, {0, 0, 3, 1.5}));
  EXPECT_FALSE(membership(t, {0, 0, 0, 0}));
  EXPECT_FALSE(membership(t, {0, 0, 0, 3}));
}

TEST(Shapes, T2B2OutermostEquatorialPoint) {
  // With the tube tilted fully into the radial direction the point at
  // distance R + r + a on the x axis is on the boundary.
  EXPECT_TRUE(membership(t2b2(1, 2, 4, kPi / 2), {7, 0, 0, 0}));
  EXPECT_FALSE(membership(t2b2(1, 2, 4, kPi / 2), {7.001, 0, 0, 0}));
  // Untilted, the middle circle lies in the (z, w) plane: the x extent is
  // R + a and (R, 0, r, 0) is on the core.
  EXPECT_FALSE(membership(t2b2(1, 2, 4, 0), {7, 0, 0, 0}));
  EXPECT_TRUE(membership(t2b2(1, 2, 4, 0), {5, 0, 2, 0}));
  EXPECT_TRUE(membership(t2b2(1, 2, 4, 0), {4, 0, 2, 0}));
  EXPECT_TRUE(membership(t2b2(1, 2, 4, 0), {4, 0, 0, -2}));
  EXPECT_FALSE(membership(t2b2(1, 2, 4, 0), {4, 0, 0, 0}));
}

TEST(Shapes, T2B2MajorRadiusLaw) {
  EXPECT_DOUBLE_EQ(t2b2_major_radius(1.5, 0), 3.0);
  EXPECT_NEAR(t2b2_major_radius(1.5, kPi / 2), 6.0, 1e-12);
  const auto s = ShapeSpec::torus_t2b2(2, kPi / 6);
  EXPECT_DOUBLE_EQ(s.r, 4);
  EXPECT_NEAR(s.R, 6, 1e-12);
  EXPECT_NO_THROW(s.validate());
}

TEST(Shapes, Hypervolumes) {
  EXPECT_NEAR(hypervolume(ShapeSpec::ball4(2)), kPi * kPi / 2 * 16, 1e-12);
  EXPECT_NEAR(hypervolume(ShapeSpec::ball4(2)), 78.9568, 1e-4);
  for (double a : {1.0, 2.5, 4.2}) {
    EXPECT_NEAR(hypervolume(ShapeSpec::torus_s1b3(a)), 16.0 / 3.0 * kPi * kPi * std::pow(a, 4), 1e-9);
    EXPECT_NEAR(hypervolume(ShapeSpec::torus_s2b2(a)), 16.0 * kPi * kPi * std::pow(a, 4), 1e-9);
    for (double alpha : {0.0, 0.3, kPi / 2}) {
      const double v = hypervolume(ShapeSpec::torus_t2b2(a, alpha));
      const double lo = 16 * std::pow(kPi, 3) * std::pow(a, 4);
      EXPECT_GE(v, lo * (1 - 1e-12));
      EXPECT_LE(v, 2 * lo * (1 + 1e-12));
    }
  }
}

TEST(Shapes, RadiusIntervalsReproduceKnownRanges) {
  const auto b = radius_interval(ShapeKind::Ball4, 2.4, 6.4);
  EXPECT_NEAR(b.lo, 7.6, 0.05);
  EXPECT_NEAR(b.hi, 24.1, 0.05);
  const auto s1 = radius_interval(ShapeKind::TorusS1B3, 2.4, 6.4);
  EXPECT_NEAR(2 * s1.lo, 8.4, 0.05);
  EXPECT_NEAR(2 * s1.hi, 26.7, 0.05);
  EXPECT_NEAR(s1.lo, 4.2, 0.05);
  EXPECT_NEAR(s1.hi, 13.3, 0.05);
  const auto s2 = radius_interval(ShapeKind::TorusS2B2, 2.4, 6.4);
  EXPECT_NEAR(2 * s2.lo, 6.4, 0.05);
  EXPECT_NEAR(2 * s2.hi, 20.3, 0.05);
  EXPECT_NEAR(s2.lo, 3.2, 0.05);
  EXPECT_NEAR(s2.hi, 10.1, 0.05);
  const auto t = radius_interval(ShapeKind::TorusT2B2, 2.4, 6.4);
  EXPECT_DOUBLE_EQ(t.lo, 2.4);
  EXPECT_DOUBLE_EQ(t.hi, 6.4);
  // S^1 x S^1 x B^2: r = 2a spans 4.8..12.8, R spans 2a_min..4a_max.
  EXPECT_NEAR(ShapeSpec::torus_t2b2(t.lo, 0).r, 4.8, 1e-12);
  EXPECT_NEAR(ShapeSpec::torus_t2b2(t.hi, 0).r, 12.8, 1e-12);
  EXPECT_NEAR(ShapeSpec::torus_t2b2(t.lo, 0).R, 4.8, 1e-12);
  EXPECT_NEAR(ShapeSpec::torus_t2b2(t.hi, kPi / 2).R, 25.6, 1e-12);
}

TEST(Shapes, RadiusIntervalErrors) {
  EXPECT_THROW(radius_interval(ShapeKind::Ball4, 0, 1), ParameterError);
  EXPECT_THROW(radius_interval(ShapeKind::Ball4, -1, 1), ParameterError);
  EXPECT_THROW(radius_interval(ShapeKind::Ball4, 3, 2), ParameterError);
}

TEST(Shapes, DegenerateIntervalSampling) {
  Rng rng(1);
  const auto s = sample_shape(rng, ShapeKind::TorusT2B2, {2.4, 2.4});
  EXPECT_DOUBLE_EQ(s.a, 2.4);
  const auto b = sample_shape(rng, ShapeKind::Ball4, {2.4, 2.4});
  EXPECT_GE(b.a, 2 * std::pow(2 * kPi, 0.25) * 2.4);
  EXPECT_LE(b.a, 2 * std::pow(4 * kPi, 0.25) * 2.4);
}

TEST(Shapes, T2B2DrawsStayInRange) {
  Rng rng(2);
  double amin = 1e9, amax = -1e9;
  for (int i = 0; i < 100000; ++i) {
    const auto s = sample_shape(rng, ShapeKind::TorusT2B2, {2.4, 6.4});
    ASSERT_GE(s.alpha, 0.0);
    ASSERT_LE(s.alpha, kPi / 2);
    ASSERT_GE(s.R / s.a, 2.0 - 1e-12);
    ASSERT_LE(s.R / s.a, 4.0 + 1e-12);
    ASSERT_DOUBLE_EQ(s.r, 2 * s.a);
    amin = std::min(amin, s.alpha);
    amax = std::max(amax, s.alpha);
  }
  EXPECT_LT(amin, 0.01);
  EXPECT_GT(amax, kPi / 2 - 0.01);
}

TEST(Shapes, DrawnHypervolumesShareOneRange) {
  Rng rng(3);
  const double lo = 16 * std::pow(kPi, 3) * std::pow(2.4, 4);
  const double hi = 32 * std::pow(kPi, 3) * std::pow(6.4, 4);
  for (ShapeKind k : kAllShapeKinds) {
    for (int i = 0; i < 100000; ++i) {
      const auto s = sample_shape(rng, k, {2.4, 6.4});
      const double v = hypervolume(s);
      ASSERT_GE(v, lo * (1 - 1e-12)) << kind_name(k);
      ASSERT_LE(v, hi * (1 + 1e-12)) << kind_name(k);
      ASSERT_NO_THROW(s.validate());
    }
  }
}

TEST(Shapes, BoundingRadii) {
  EXPECT_DOUBLE_EQ(bounding_radius(ShapeSpec::ball4(5)), 5);
  EXPECT_DOUBLE_EQ(bounding_radius(ShapeSpec::torus_s1b3(2)), 6);
  EXPECT_DOUBLE_EQ(bounding_radius(t2b2(1, 2, 4, 0.7)), 7);
}

TEST(Shapes, MemberPointsLieInsideBoundingRadius) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-7.5, 7.5);
  for (double alpha : {0.0, kPi / 4, kPi / 2}) {
    const auto s = t2b2(1, 2, 4, alpha);
    std::size_t members = 0;
    for (int i = 0; i < 1000000; ++i) {
      const Vec4 p{u(rng), u(rng), u(rng), u(rng)};
      if (!membership(s, p)) continue;
      ++members;
      ASSERT_LE(norm(p), 7.0 + 1e-12);
    }
    EXPECT_GT(members, 1000u);
  }
  for (ShapeKind k : {ShapeKind::Ball4, ShapeKind::TorusS1B3, ShapeKind::TorusS2B2}) {
    const auto s = ShapeSpec::canonical(k, 1.3);
    const double rho = bounding_radius(s);
    std::uniform_real_distribution<double> v(-rho - 0.5, rho + 0.5);
    for (int i = 0; i < 200000; ++i) {
      const Vec4 p{v(rng), v(rng), v(rng), v(rng)};
      if (membership(s, p)) {
        ASSERT_LE(norm(p), rho + 1e-12);
      }
    }
  }
}

// Independent integral of each solid. S^2 x B^2 picks up pi^2 a^4 from the
// curvature of the sphere, which the tabulated formula leaves out.
double solid_volume(const ShapeSpec& s) {
  const double a = s.a;
  switch (s.kind) {
    case ShapeKind::Ball4: return kPi * kPi / 2 * a * a * a * a;
    case ShapeKind::TorusS1B3: return 2 * kPi * s.R * (4.0 / 3.0 * kPi * a * a * a);
    case ShapeKind::TorusS2B2: return 4 * kPi * (kPi * s.R * s.R * a * a + kPi * a * a * a * a / 4);
    case ShapeKind::TorusT2B2: return 2 * kPi * s.R * (2 * kPi * kPi * s.r * a * a);
  }
  return 0;
}

TEST(Shapes, TabulatedS2B2VolumeOmitsCurvatureTerm) {
  for (double a : {1.0, 2.5, 6.0}) {
    const auto s = ShapeSpec::torus_s2b2(a);
    EXPECT_NEAR(hypervolume(s), 16 * kPi * kPi * a * a * a * a, 1e-9 * hypervolume(s));
    EXPECT_NEAR(solid_volume(s) / hypervolume(s), 17.0 / 16.0, 1e-12);
  }
}

// Fraction of uniform box points inside the shape, scaled by the box volume,
// should agree with the integral within three standard errors.
TEST(Shapes, MonteCarloHypervolume) {
  Rng rng(5);
  std::vector<ShapeSpec> shapes{ShapeSpec::ball4(2.0), ShapeSpec::torus_s1b3(1.5),
                                ShapeSpec::torus_s2b2(1.2), ShapeSpec::torus_t2b2(1.0, 0.0),
                                ShapeSpec::torus_t2b2(1.0, 0.6), ShapeSpec::torus_t2b2(1.0, kPi / 2)};
  for (const auto& s : shapes) {
    const double rho = bounding_radius(s);
    std::uniform_real_distribution<double> u(-rho, rho);
    const int n = 1000000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += membership(s, {u(rng), u(rng), u(rng), u(rng)}) ? 1 : 0;
    const double box = std::pow(2 * rho, 4);
    const double frac = static_cast<double>(hits) / n;
    const double est = frac * box;
    const double se = box * std::sqrt(frac * (1 - frac) / n);
    if (s.kind != ShapeKind::TorusS2B2) {
      EXPECT_DOUBLE_EQ(solid_volume(s), hypervolume(s));
    }
    EXPECT_NEAR(est, solid_volume(s), 3 * se) << kind_name(s.kind) << " alpha " << s.alpha;
  }
}

TEST(Shapes, MembershipMonotoneInRadius) {
  Rng rng(6);
  std::uniform_real_distribution<double> u(-12, 12), ua(0.5, 3.0), ualpha(0, kPi / 2);
  for (int i = 0; i < 20000; ++i) {
    const Vec4 p{u(rng), u(rng), u(rng), u(rng)};
    const double a = ua(rng);
    const double a2 = a + ua(rng);
    const double alpha = ualpha(rng);
    for (ShapeKind k : kAllShapeKinds) {
      ShapeSpec s = ShapeSpec::canonical(k, a, alpha);
      if (!membership(s, p)) continue;
      s.a = a2;  // other parameters fixed
      ASSERT_TRUE(membership(s, p)) << kind_name(k);
    }
  }
}

TEST(Shapes, ValidateCoupling) {
  EXPECT_NO_THROW(ShapeSpec::ball4(1).validate());
  ShapeSpec bad = ShapeSpec::torus_s1b3(2);
  bad.R = 3;
  EXPECT_THROW(bad.validate(), ParameterError);
  EXPECT_THROW(ShapeSpec::ball4(0).validate(), ParameterError);
  EXPECT_THROW(t2b2(1, 2, 5, 0.3).validate(), ParameterError);
  EXPECT_THROW(t2b2(1, 2, 3, 2.0).validate(), ParameterError);
}

TEST(Shapes, KindNamesRoundTrip) {
  for (ShapeKind k : kAllShapeKinds) EXPECT_EQ(parse_kind(kind_name(k)), k);
  EXPECT_FALSE(parse_kind("klein_bottle").has_value());
}
