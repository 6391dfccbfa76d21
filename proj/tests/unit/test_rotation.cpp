#include "panoworld/common/error.hpp"
#include "panoworld/geometry/rotation.hpp"
#include "panoworld/metrics/image_quality.hpp"
#include "patterns.hpp"

#include <gtest/gtest.h>

#include <random>

namespace panoworld::geo {
namespace {

using testing::pattern_corpus;
using testing::random_image;

TEST(RotateSphere, IdentityAndWrap) {
  const SphericalCoord c = rotate_sphere({0.3, 0.1}, RotationSpec{});
  EXPECT_DOUBLE_EQ(c.phi, 0.3);
  EXPECT_DOUBLE_EQ(c.theta, 0.1);
  const SphericalCoord w = rotate_sphere({kPi - 0.1, 0.0}, RotationSpec{0.2, 0.0, RotationMode::YawOnly});
  EXPECT_NEAR(w.phi, -kPi + 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(w.theta, 0.0);
}

TEST(RotateSphere, YawOnlyRejectsPitch) {
  EXPECT_THROW(rotate_sphere({0, 0}, RotationSpec{0.1, 0.2, RotationMode::YawOnly}), Error);
}

TEST(RotateSphere, Full3dInverseIsIdentity) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> phi(-kPi, kPi);
  std::uniform_real_distribution<double> theta(-kHalfPi, kHalfPi);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SphericalCoord c{phi(rng), 0.999 * theta(rng)};
    const RotationSpec spec{phi(rng), theta(rng), RotationMode::Full3d};
    const Rotation r = Rotation::from_spec(spec);
    const SphericalCoord fwd = rotate_sphere(c, spec);
    ASSERT_TRUE(in_range(fwd));
    const SphericalCoord back = rotate_sphere(fwd, r.inverse());
    worst = std::max({worst, std::abs(wrap_pi(back.phi - c.phi)), std::abs(back.theta - c.theta)});
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(RotateSphere, Full3dYawMatchesYawOnly) {
  const SphericalCoord a = rotate_sphere({1.0, 0.4}, RotationSpec{0.7, 0.0, RotationMode::Full3d});
  const SphericalCoord b = rotate_sphere({1.0, 0.4}, RotationSpec{0.7, 0.0, RotationMode::YawOnly});
  EXPECT_NEAR(a.phi, b.phi, 1e-12);
  EXPECT_NEAR(a.theta, b.theta, 1e-12);
}

TEST(RotateSphere, PoleIsHandled) {
  const SphericalCoord c = rotate_sphere({0.0, 1.2}, RotationSpec{0.0, 0.5, RotationMode::Full3d});
  EXPECT_TRUE(in_range(c));
  // Pitching past the pole flips to the far meridian.
  EXPECT_NEAR(c.theta, kPi - 1.7, 1e-12);
  EXPECT_NEAR(std::abs(c.phi), kPi, 1e-12);
}

TEST(IntegerColumnShift, DetectsWholeColumns) {
  EXPECT_EQ(integer_column_shift(kPi, 1024), 512);
  EXPECT_EQ(integer_column_shift(kTwoPi, 1024), 0);
  EXPECT_EQ(integer_column_shift(-kTwoPi / 1024, 1024), 1023);
  EXPECT_FALSE(integer_column_shift(0.37, 1024).has_value());
}

TEST(RotatePanorama, FullTurnIsIdentity) {
  const Panorama x = random_image(1, 64, 32);
  EXPECT_EQ(rotate_panorama(x, RotationSpec{kTwoPi, 0.0}), x);
}

TEST(RotatePanorama, HalfTurnIsRollBy512) {
  const Panorama x = random_image(2, 1024, 512);
  const Panorama y = rotate_panorama(x, RotationSpec{kPi, 0.0});
  for (int r = 0; r < 512; r += 37) {
    for (int c = 0; c < 1024; ++c) ASSERT_EQ(y.at(c, r), x.at((c + 512) % 1024, r));
  }
}

TEST(RotatePanorama, OutputSamplesInverseRotatedPosition) {
  // A positive yaw moves content toward larger phi (larger u).
  const Panorama x = random_image(3, 64, 32);
  const Panorama y = rotate_panorama(x, RotationSpec{kTwoPi * 3 / 64, 0.0});
  EXPECT_EQ(y.at(10, 5), x.at(7, 5));
  EXPECT_EQ(y, roll_columns(x, 3));
}

TEST(RotatePanorama, IntegerYawIsExactlyInvertibleAndComposes) {
  const Panorama x = random_image(4, 128, 64);
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> cols(-300, 300);
  for (int i = 0; i < 20; ++i) {
    const int a = cols(rng), b = cols(rng);
    const RotationSpec ra{kTwoPi * a / 128, 0.0};
    const RotationSpec rb{kTwoPi * b / 128, 0.0};
    const RotationSpec inv{-ra.delta_phi, 0.0};
    ASSERT_EQ(rotate_panorama(rotate_panorama(x, ra), inv), x);
    ASSERT_EQ(rotate_panorama(rotate_panorama(x, ra), rb), rotate_panorama(x, RotationSpec{ra.delta_phi + rb.delta_phi, 0.0}));
  }
}

TEST(RotatePanorama, FractionalYawCommutesWithIntegerRoll) {
  const Panorama x = random_image(5, 96, 48);
  const RotationSpec frac{0.1234, 0.0};
  const Panorama a = rotate_panorama(roll_columns(x, 17), frac);
  const Panorama b = roll_columns(rotate_panorama(x, frac), 17);
  EXPECT_EQ(a, b);
}

TEST(RotatePanorama, FractionalYawAgreesWithGeneralPath) {
  for (const Panorama& x : pattern_corpus(256, 128)) {
    const Panorama fast = rotate_panorama(x, RotationSpec{0.37, 0.0});
    const Panorama general = rotate_panorama(x, Rotation::yaw(0.37));
    EXPECT_GT(metrics::psnr(fast, general), 60.0);
  }
}

TEST(RotatePanorama, Full3dRoundTripPsnrAbove35AtW2048) {
  for (int kind : {0, 1}) {
    const Panorama x = testing::sphere_pattern(kind, 2048, 1024);
    const RotationSpec spec{0.37, 0.0, RotationMode::Full3d};
    const Panorama yaw_back = rotate_panorama(rotate_panorama(x, spec), RotationSpec{-0.37, 0.0, RotationMode::Full3d});
    EXPECT_GT(metrics::psnr(x, yaw_back), 35.0);
    const RotationSpec tilted{0.37, 0.21, RotationMode::Full3d};
    const Panorama tilt_back = rotate_panorama(rotate_panorama(x, tilted), Rotation::from_spec(tilted).inverse());
    EXPECT_GT(metrics::psnr(x, tilt_back), 35.0);
  }
}

TEST(RotatePanorama, SerialAndParallelBitIdentical) {
  const Panorama x = random_image(6, 128, 64);
  const Rotation r = Rotation::from_spec({0.4, -0.3, RotationMode::Full3d});
  EXPECT_EQ(rotate_panorama(x, r, Interp::Bilinear, Exec::Serial), rotate_panorama(x, r, Interp::Bilinear, Exec::Parallel));
}

}  // namespace
}  // namespace panoworld::geo
