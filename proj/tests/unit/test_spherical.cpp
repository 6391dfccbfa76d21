#include "panoworld/common/error.hpp"
#include "panoworld/geometry/spherical.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace panoworld::geo {
namespace {

TEST(SphereToPixel, CenterMapsToImageCenter) {
  const PixelCoord p = sphere_to_pixel({0.0, 0.0}, 1024, 512);
  EXPECT_DOUBLE_EQ(p.u, 512.0);
  EXPECT_DOUBLE_EQ(p.v, 256.0);
}

TEST(SphereToPixel, LowerCornerMapsToOrigin) {
  const PixelCoord p = sphere_to_pixel({-kPi, kHalfPi}, 1024, 512);
  EXPECT_DOUBLE_EQ(p.u, 0.0);
  EXPECT_DOUBLE_EQ(p.v, 0.0);
}

TEST(PixelToSphere, Examples) {
  SphericalCoord c = pixel_to_sphere({0.0, 0.0}, 1024, 512);
  EXPECT_DOUBLE_EQ(c.phi, -kPi);
  EXPECT_DOUBLE_EQ(c.theta, kHalfPi);
  c = pixel_to_sphere({512.0, 256.0}, 1024, 512);
  EXPECT_DOUBLE_EQ(c.phi, 0.0);
  EXPECT_DOUBLE_EQ(c.theta, 0.0);
  // Independent substitution: 2*pi*256/1024 - pi = -pi/2; pi/2 - pi*128/512 = pi/4.
  c = pixel_to_sphere({256.0, 128.0}, 1024, 512);
  EXPECT_NEAR(c.phi, -kPi / 2, 1e-15);
  EXPECT_NEAR(c.theta, kPi / 4, 1e-15);
}

TEST(SphereToPixel, RejectsOutOfRange) {
  EXPECT_THROW(sphere_to_pixel({kPi, 0.0}, 8, 4), Error);
  EXPECT_THROW(sphere_to_pixel({0.0, 1.6}, 8, 4), Error);
  EXPECT_THROW(sphere_to_pixel({0.0, 0.0}, 0, 4), Error);
  EXPECT_THROW(pixel_to_sphere({8.0, 0.0}, 8, 4), Error);
  EXPECT_THROW(pixel_to_sphere({0.0, 4.5}, 8, 4), Error);
  EXPECT_THROW(pixel_to_sphere({-0.1, 0.0}, 8, 4), Error);
  try {
    sphere_to_pixel({std::nan(""), 0.0}, 8, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(SphereToPixel, RoundTripRandom) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> phi(-kPi, kPi);
  std::uniform_real_distribution<double> theta(-kHalfPi, kHalfPi);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const SphericalCoord c{phi(rng), theta(rng)};
    const SphericalCoord back = pixel_to_sphere(sphere_to_pixel(c, 1024, 512), 1024, 512);
    worst = std::max({worst, std::abs(back.phi - c.phi), std::abs(back.theta - c.theta)});
    ASSERT_TRUE(in_range(back));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(WrapPi, Range) {
  EXPECT_DOUBLE_EQ(wrap_pi(kPi), -kPi);
  EXPECT_DOUBLE_EQ(wrap_pi(0.5), 0.5);
  EXPECT_NEAR(wrap_pi(3 * kPi + 0.25), -kPi + 0.25, 1e-12);
  EXPECT_NEAR(wrap_pi(-kPi - 0.25), kPi - 0.25, 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> any(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double w = wrap_pi(any(rng));
    ASSERT_GE(w, -kPi);
    ASSERT_LT(w, kPi);
  }
}

TEST(Direction, AxesMatchConvention) {
  EXPECT_TRUE(to_direction({0.0, 0.0}).isApprox(Vec3(1, 0, 0)));
  EXPECT_TRUE(to_direction({kHalfPi, 0.0}).isApprox(Vec3(0, 0, 1)));
  EXPECT_NEAR((to_direction({0.0, kHalfPi}) - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
}

TEST(Direction, RoundTripAndPoleFold) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> phi(-kPi, kPi);
  std::uniform_real_distribution<double> theta(-1.5, 1.5);
  for (int i = 0; i < 10000; ++i) {
    const SphericalCoord c{phi(rng), theta(rng)};
    const SphericalCoord b = from_direction(to_direction(c));
    ASSERT_NEAR(std::abs(wrap_pi(b.phi - c.phi)), 0.0, 1e-12);
    ASSERT_NEAR(b.theta, c.theta, 1e-12);
  }
  const SphericalCoord back = from_direction(Vec3(-1, 0, 0));
  EXPECT_DOUBLE_EQ(back.phi, -kPi);
  EXPECT_TRUE(in_range(from_direction(Vec3(0, 1, 0))));
}

TEST(Direction, PixelCenterFastPathAgreesWithCheckedPath) {
  const int w = 64, h = 32;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 fast = pixel_center_direction(x, y, w, h);
      const Vec3 slow = to_direction(pixel_to_sphere({x + 0.5, y + 0.5}, w, h));
      ASSERT_LT((fast - slow).norm(), 1e-14);
      const PixelCoord p = direction_to_pixel(fast, w, h);
      ASSERT_NEAR(p.u, x + 0.5, 1e-9);
      ASSERT_NEAR(p.v, y + 0.5, 1e-9);
    }
  }
}

}  // namespace
}  // namespace panoworld::geo
