#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/geometry/spherical.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace panoworld::world {

using geo::Vec3;

enum class PrimitiveKind { Box, Cylinder, Sphere };

/// A colored solid. `size` holds full extents: box (sx, sy, sz); cylinder
/// (diameter, height, diameter) with a vertical axis; sphere (diameter, ...).
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Box;
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  Rgb color{0.5f, 0.5f, 0.5f};
  std::string tag;  // semantic label, e.g. "ambulance"; empty when untagged

  double radius() const { return 0.5 * size.x(); }
  /// Half extents of the axis-aligned bounding box.
  Vec3 half_extents() const;
  double bottom() const { return center.y() - half_extents().y(); }
  double top() const { return center.y() + half_extents().y(); }
  /// Radius of a sphere around `center` enclosing the primitive.
  double bounding_radius() const;
  /// Negative inside, zero on the surface.
  double signed_distance(const Vec3& p) const;
  bool contains(const Vec3& p) const { return signed_distance(p) < 0.0; }

  /// Throws ErrorKind::Domain on non-positive dimensions.
  void validate() const;
};

struct Ground {
  double height = 0.0;
  Rgb color{0.45f, 0.45f, 0.42f};
  Rgb alt_color{0.36f, 0.36f, 0.34f};
  double tile_size = 0.0;  // checker period in meters; 0 = untextured
};

enum class SceneStyle { Geometry, LowTexture };

struct SceneParams {
  double extent = 30.0;       // primitives are placed in [-extent, extent]^2
  double density = 0.02;      // expected primitives per square meter
  int min_count = 8;
  int max_count = 60;
  SceneStyle style = SceneStyle::Geometry;
  double spawn_radius = 3.0;  // disk around the origin kept free for agents
  double ground_tile = 2.0;
};

inline constexpr double kDefaultCameraHeight = 1.6;

struct Scene {
  std::uint64_t seed = 0;
  SceneParams params;
  Rgb sky_color{0.62f, 0.78f, 0.95f};
  Ground ground;
  double camera_height = kDefaultCameraHeight;
  Vec3 light_direction = Vec3(0.5, 1.0, 0.3).normalized();
  std::vector<Primitive> primitives;

  /// Index of a primitive with the given tag, or -1.
  int find_tag(const std::string& tag) const;
};

/// Camera position (eye point) and heading. yaw is measured from +X toward
/// +Z in the horizontal plane; positive yaw turns right. World +Y is up.
struct Pose {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;

  Vec3 forward() const;
  /// Throws ErrorKind::Domain unless yaw lies in [-pi, pi).
  void validate() const;
};

/// Pose at ground position (x, z) with the scene's camera height.
Pose eye_pose(const Scene& scene, double x, double z, double yaw);

/// Deterministic procedural scene. Same seed and params => identical scene.
Scene generate_scene(std::uint64_t seed, const SceneParams& params = {});

inline constexpr const char* kSceneSchema = "panoworld.scene/1";

nlohmann::json to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& doc);
/// Canonical text form (pretty JSON); byte-identical for identical scenes.
std::string serialize(const Scene& scene);

nlohmann::json to_json(const Primitive& primitive);
Primitive primitive_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Pose& pose);
Pose pose_from_json(const nlohmann::json& doc);

nlohmann::json rgb_json(const Rgb& c);
Rgb rgb_from_json(const nlohmann::json& doc);

}  // namespace panoworld::world
