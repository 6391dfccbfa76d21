#include "panoworld/common/error.hpp"
#include "panoworld/world/collision.hpp"
#include "patterns.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace panoworld::world {
namespace {

const Vec3 kEye(0, 1.6, 0);

Vec3 at(double x, double z) { return {x, 1.6, z}; }

TEST(Collision, EmptySpaceIsFree) {
  EXPECT_FALSE(check_collision(testing::empty_scene(), at(0, 0), at(10, 0), 0.5));
}

TEST(Collision, ThroughBoxCenterCollides) {
  const Scene s = testing::single_box_scene({5, 1, 0}, {2, 2, 2});
  EXPECT_TRUE(check_collision(s, at(0, 0), at(10, 0), 0.5));
  EXPECT_TRUE(check_collision(s, at(0, 0), at(10, 0), 0.0));
}

TEST(Collision, TangencyAtExactlyClearanceCounts) {
  // Box spans z in [-1, 1]; the path runs along z = 1.5.
  const Scene s = testing::single_box_scene({5, 1, 0}, {2, 2, 2});
  EXPECT_TRUE(check_collision(s, at(0, 1.5), at(10, 1.5), 0.5));
  EXPECT_FALSE(check_collision(s, at(0, 1.5), at(10, 1.5), 0.4999));
  EXPECT_FALSE(check_collision(s, at(0, 1.5000001), at(10, 1.5000001), 0.5));
}

TEST(Collision, EndpointAndCornerDistances) {
  const Scene s = testing::single_box_scene({5, 1, 0}, {2, 2, 2});
  // Segment stops 0.5 m short of the face x = 4.
  EXPECT_TRUE(check_collision(s, at(0, 0), at(3.5, 0), 0.5));
  EXPECT_FALSE(check_collision(s, at(0, 0), at(3.4, 0), 0.5));
  // Diagonal z - x = -2.4 passes the corner (4, 1) at distance 0.6 / sqrt(2).
  EXPECT_NEAR(footprint_distance(s.primitives[0], 2.0, -0.4, 5.0, 2.6), 0.6 / std::sqrt(2.0), 1e-12);
  EXPECT_EQ(footprint_distance(s.primitives[0], 3.0, 0.0, 5.0, 0.5), 0.0);
}

TEST(Collision, CylinderTangency) {
  Scene s = testing::empty_scene();
  s.primitives.push_back({PrimitiveKind::Cylinder, {5, 1, 0}, {2, 2, 2}, {}, {}});
  EXPECT_TRUE(check_collision(s, at(0, 1.5), at(10, 1.5), 0.5));
  EXPECT_FALSE(check_collision(s, at(0, 1.6), at(10, 1.6), 0.5));
}

TEST(Collision, PrimitiveAboveTheAgentDoesNotBlock) {
  const Scene s = testing::single_box_scene({5, 10, 0}, {2, 2, 2});
  EXPECT_FALSE(check_collision(s, at(0, 0), at(10, 0), 0.5));
  // A vertical leg that climbs into it does.
  EXPECT_TRUE(check_collision(s, Vec3(5, 1.6, 0), Vec3(5, 12, 0), 0.5));
}

TEST(Collision, NegativeClearanceIsDomainError) {
  EXPECT_THROW(check_collision(testing::empty_scene(), kEye, kEye, -0.1), Error);
}

}  // namespace
}  // namespace panoworld::world
