#include "panoworld/common/error.hpp"
#include "panoworld/world/dataset.hpp"
#include "panoworld/world/path.hpp"
#include "panoworld/world/scene.hpp"
#include "patterns.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace panoworld::world {
namespace {

TEST(GenerateScene, SameSeedGivesIdenticalSerialization) {
  EXPECT_EQ(serialize(generate_scene(7)), serialize(generate_scene(7)));
  EXPECT_NE(serialize(generate_scene(7)), serialize(generate_scene(8)));
}

TEST(GenerateScene, ZeroDensityIsEmptyWorld) {
  SceneParams p;
  p.density = 0.0;
  const Scene s = generate_scene(3, p);
  EXPECT_TRUE(s.primitives.empty());
}

TEST(GenerateScene, CountWithinBoundsAndSpawnRegionFree) {
  const SceneParams p;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scene s = generate_scene(seed, p);
    ASSERT_GE(static_cast<int>(s.primitives.size()), p.min_count) << seed;
    ASSERT_LE(static_cast<int>(s.primitives.size()), p.max_count) << seed;
    for (const Primitive& prim : s.primitives) {
      ASSERT_NO_THROW(prim.validate());
      // the origin column with spawn clearance never touches a primitive
      const double d = prim.kind == PrimitiveKind::Box
                           ? std::hypot(std::max(std::abs(prim.center.x()) - prim.size.x() / 2, 0.0),
                                        std::max(std::abs(prim.center.z()) - prim.size.z() / 2, 0.0))
                           : std::max(std::hypot(prim.center.x(), prim.center.z()) - prim.radius(), 0.0);
      ASSERT_GE(d, p.spawn_radius);
      ASSERT_NEAR(prim.bottom(), s.ground.height, 1e-12);
    }
  }
}

TEST(GenerateScene, LowTextureStyleProducesBuildings) {
  SceneParams p;
  p.style = SceneStyle::LowTexture;
  p.density = 0.01;
  const Scene s = generate_scene(5, p);
  ASSERT_FALSE(s.primitives.empty());
  for (const Primitive& prim : s.primitives) EXPECT_NE(prim.kind, PrimitiveKind::Sphere);
}

TEST(GenerateScene, RejectsBadParams) {
  SceneParams p;
  p.extent = 0.0;
  EXPECT_THROW(generate_scene(1, p), Error);
  p = {};
  p.min_count = 5;
  p.max_count = 2;
  EXPECT_THROW(generate_scene(1, p), Error);
}

TEST(SceneJson, RoundTripIsLossless) {
  Scene s = generate_scene(11);
  s.primitives.front().tag = "ambulance";
  const Scene back = scene_from_json(nlohmann::json::parse(serialize(s)));
  EXPECT_EQ(serialize(back), serialize(s));
  EXPECT_EQ(back.find_tag("ambulance"), 0);
  EXPECT_EQ(back.find_tag("taxi"), -1);
}

TEST(SceneJson, RejectsWrongSchemaAndBadPrimitives) {
  nlohmann::json doc = to_json(generate_scene(1));
  doc["schema"] = "other/9";
  EXPECT_THROW(scene_from_json(doc), Error);
  doc = to_json(generate_scene(1));
  doc["primitives"][0]["size"] = {1.0, -1.0, 1.0};
  EXPECT_THROW(scene_from_json(doc), Error);
  doc = to_json(generate_scene(1));
  doc["primitives"][0]["kind"] = "torus";
  EXPECT_THROW(scene_from_json(doc), Error);
}

TEST(Primitive, SignedDistance) {
  Primitive box{PrimitiveKind::Box, {0, 1, 0}, {2, 2, 2}, {}, {}};
  EXPECT_NEAR(box.signed_distance({3, 1, 0}), 2.0, 1e-12);
  EXPECT_NEAR(box.signed_distance({0, 1, 0}), -1.0, 1e-12);
  Primitive cyl{PrimitiveKind::Cylinder, {0, 1, 0}, {2, 2, 2}, {}, {}};
  EXPECT_NEAR(cyl.signed_distance({0, 1, 3}), 2.0, 1e-12);
  EXPECT_TRUE(cyl.contains({0.5, 1.5, 0.0}));
  Primitive sph{PrimitiveKind::Sphere, {0, 1, 0}, {2, 2, 2}, {}, {}};
  EXPECT_NEAR(sph.signed_distance({0, 4, 0}), 2.0, 1e-12);
  EXPECT_NEAR(box.bounding_radius(), std::sqrt(3.0), 1e-12);
}

TEST(Pose, ValidateAndForward) {
  EXPECT_THROW((Pose{{0, 0, 0}, geo::kPi}).validate(), Error);
  EXPECT_NO_THROW((Pose{{0, 0, 0}, -geo::kPi}).validate());
  EXPECT_TRUE((Pose{{0, 0, 0}, geo::kHalfPi}).forward().isApprox(Vec3(0, 0, 1)));
  const Pose p = pose_from_json(to_json(Pose{{1, 2, 3}, 0.5}));
  EXPECT_EQ(p.position, Vec3(1, 2, 3));
  EXPECT_EQ(p.yaw, 0.5);
}

TEST(StraightPath, EmptySceneSpacingIsTwentyOverFortyNine) {
  const Scene s = testing::empty_scene();
  std::mt19937_64 rng(1);
  const PathSample path = sample_straight_path(s, rng);
  ASSERT_EQ(path.poses.size(), 50u);
  for (std::size_t k = 1; k < path.poses.size(); ++k) {
    ASSERT_NEAR((path.poses[k].position - path.poses[k - 1].position).norm(), 20.0 / 49.0, 1e-12);
    ASSERT_EQ(path.poses[k].yaw, path.start.yaw);
  }
  // close to the 0.4 m/frame navigation semantics
  EXPECT_NEAR(path.spacing(), 0.4, 0.01);
}

TEST(StraightPath, BlockedSceneRaisesNoFreePath) {
  Scene s = testing::single_box_scene({0, 5, 0}, {400, 10, 400});
  std::mt19937_64 rng(2);
  PathOptions opt;
  opt.max_retries = 50;
  try {
    sample_straight_path(s, rng, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoFreePath);
  }
}

TEST(StraightPath, SamplesOnDefaultSceneAreCollisionFree) {
  const Scene s = generate_scene(21);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const PathSample path = sample_straight_path(s, rng);
    for (std::size_t k = 1; k < path.poses.size(); ++k) {
      ASSERT_FALSE(check_collision(s, path.poses[k - 1], path.poses[k], kDefaultClearance));
    }
  }
}

TEST(Dataset, OnePathIsFiftyFramesMatchingRenders) {
  const Scene s = generate_scene(2);
  DatasetOptions opt;
  opt.width = 64;
  opt.height = 32;
  int frames = 0;
  const auto manifest = generate_dataset(s, opt, 9, [&](int path, int frame, const Pose& pose, const Panorama& view) {
    EXPECT_EQ(path, 0);
    EXPECT_EQ(frame, frames++);
    EXPECT_EQ(view, render_panorama(s, pose, 64, 32));
  });
  EXPECT_EQ(frames, 50);
  EXPECT_EQ(manifest["paths"].size(), 1u);
  EXPECT_EQ(manifest["paths"][0]["poses"].size(), 50u);
  EXPECT_NEAR(manifest["paths"][0]["spacing_m"].get<double>(), 0.4, 0.01);
  EXPECT_EQ(manifest["conditioning"]["first_frame_max"], 25);
  EXPECT_EQ(manifest["conditioning"]["target_frames"], 25);
}

}  // namespace
}  // namespace panoworld::world
