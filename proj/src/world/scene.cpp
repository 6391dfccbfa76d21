#include "panoworld/world/scene.hpp"

#include "panoworld/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace panoworld::world {

using nlohmann::json;

Vec3 Primitive::half_extents() const {
  switch (kind) {
    case PrimitiveKind::Box: return 0.5 * size;
    case PrimitiveKind::Cylinder: return {radius(), 0.5 * size.y(), radius()};
    case PrimitiveKind::Sphere: return {radius(), radius(), radius()};
  }
  return 0.5 * size;
}

double Primitive::bounding_radius() const {
  switch (kind) {
    case PrimitiveKind::Box: return (0.5 * size).norm();
    case PrimitiveKind::Cylinder: return std::hypot(radius(), 0.5 * size.y());
    case PrimitiveKind::Sphere: return radius();
  }
  return (0.5 * size).norm();
}

double Primitive::signed_distance(const Vec3& p) const {
  const Vec3 q = p - center;
  switch (kind) {
    case PrimitiveKind::Box: {
      const Vec3 d = q.cwiseAbs() - 0.5 * size;
      return d.cwiseMax(0.0).norm() + std::min(d.maxCoeff(), 0.0);
    }
    case PrimitiveKind::Cylinder: {
      const double dr = std::hypot(q.x(), q.z()) - radius();
      const double dy = std::abs(q.y()) - 0.5 * size.y();
      return std::min(std::max(dr, dy), 0.0) + std::hypot(std::max(dr, 0.0), std::max(dy, 0.0));
    }
    case PrimitiveKind::Sphere: return q.norm() - radius();
  }
  return 0.0;
}

void Primitive::validate() const {
  if (!(size.x() > 0.0 && size.y() > 0.0 && size.z() > 0.0)) {
    throw Error(ErrorKind::Domain, "primitive dimensions must be strictly positive");
  }
}

int Scene::find_tag(const std::string& tag) const {
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    if (primitives[i].tag == tag) return static_cast<int>(i);
  }
  return -1;
}

Vec3 Pose::forward() const { return {std::cos(yaw), 0.0, std::sin(yaw)}; }

void Pose::validate() const {
  if (!(yaw >= -geo::kPi && yaw < geo::kPi)) {
    throw Error(ErrorKind::Domain, "pose yaw must lie in [-pi, pi)");
  }
}

Pose eye_pose(const Scene& scene, double x, double z, double yaw) {
  return {Vec3(x, scene.ground.height + scene.camera_height, z), geo::wrap_pi(yaw)};
}

namespace {

const std::vector<Rgb>& palette_for(SceneStyle style) {
  static const std::vector<Rgb> geometry = {
      {0.85f, 0.33f, 0.10f}, {0.20f, 0.55f, 0.85f}, {0.95f, 0.75f, 0.15f}, {0.30f, 0.70f, 0.35f},
      {0.60f, 0.35f, 0.75f}, {0.10f, 0.75f, 0.75f}, {0.90f, 0.50f, 0.60f}, {0.55f, 0.40f, 0.25f},
  };
  static const std::vector<Rgb> low_texture = {
      {0.78f, 0.76f, 0.72f}, {0.66f, 0.66f, 0.68f}, {0.72f, 0.68f, 0.60f}, {0.58f, 0.60f, 0.62f},
      {0.82f, 0.80f, 0.78f}, {0.62f, 0.58f, 0.55f},
  };
  return style == SceneStyle::Geometry ? geometry : low_texture;
}

// Distance from the origin to the primitive footprint in the ground plane.
double footprint_distance_to_origin(const Primitive& p) {
  if (p.kind == PrimitiveKind::Box) {
    const double dx = std::max(std::abs(p.center.x()) - 0.5 * p.size.x(), 0.0);
    const double dz = std::max(std::abs(p.center.z()) - 0.5 * p.size.z(), 0.0);
    return std::hypot(dx, dz);
  }
  return std::max(std::hypot(p.center.x(), p.center.z()) - p.radius(), 0.0);
}

double footprint_radius(const Primitive& p) {
  const Vec3 h = p.half_extents();
  return std::hypot(h.x(), h.z());
}

}  // namespace

Scene generate_scene(std::uint64_t seed, const SceneParams& params) {
  if (!(params.extent > 0.0)) throw Error(ErrorKind::Domain, "scene extent must be positive");
  if (params.min_count < 0 || params.max_count < params.min_count) {
    throw Error(ErrorKind::Domain, "scene primitive count bounds are inconsistent");
  }
  Scene scene;
  scene.seed = seed;
  scene.params = params;
  if (params.style == SceneStyle::LowTexture) {
    scene.sky_color = {0.76f, 0.80f, 0.86f};
    scene.ground.color = {0.52f, 0.52f, 0.50f};
    scene.ground.alt_color = {0.47f, 0.47f, 0.45f};
  }
  scene.ground.tile_size = params.ground_tile;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  if (params.density <= 0.0) return scene;

  const double area = 4.0 * params.extent * params.extent;
  const double target = params.density * area * uniform(0.8, 1.2);
  const int count = std::clamp(static_cast<int>(std::lround(target)), params.min_count, params.max_count);
  const auto& palette = palette_for(params.style);

  constexpr int kPlacementAttempts = 64;
  for (int n = 0; n < count; ++n) {
    for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
      Primitive p;
      const double pick = unit(rng);
      if (params.style == SceneStyle::Geometry) {
        if (pick < 0.45) {
          p.kind = PrimitiveKind::Box;
          p.size = {uniform(0.8, 3.5), uniform(0.8, 4.0), uniform(0.8, 3.5)};
        } else if (pick < 0.85) {
          p.kind = PrimitiveKind::Cylinder;
          const double d = uniform(0.8, 3.0);
          p.size = {d, uniform(1.0, 5.0), d};
        } else {
          p.kind = PrimitiveKind::Sphere;
          const double d = uniform(1.0, 3.0);
          p.size = {d, d, d};
        }
      } else {
        if (pick < 0.85) {
          p.kind = PrimitiveKind::Box;
          p.size = {uniform(3.0, 8.0), uniform(4.0, 15.0), uniform(3.0, 8.0)};
        } else {
          p.kind = PrimitiveKind::Cylinder;
          const double d = uniform(2.0, 5.0);
          p.size = {d, uniform(4.0, 12.0), d};
        }
      }
      const double x = uniform(-params.extent, params.extent);
      const double z = uniform(-params.extent, params.extent);
      p.center = {x, scene.ground.height + p.half_extents().y(), z};
      p.color = palette[static_cast<std::size_t>(unit(rng) * palette.size()) % palette.size()];

      if (footprint_distance_to_origin(p) < params.spawn_radius) continue;
      const bool overlaps = std::any_of(scene.primitives.begin(), scene.primitives.end(), [&](const Primitive& q) {
        const double d = std::hypot(p.center.x() - q.center.x(), p.center.z() - q.center.z());
        return d < footprint_radius(p) + footprint_radius(q) + 0.3;
      });
      if (overlaps) continue;
      scene.primitives.push_back(p);
      break;
    }
  }
  return scene;
}

json rgb_json(const Rgb& c) { return json::array({c.r, c.g, c.b}); }

Rgb rgb_from_json(const json& doc) {
  if (!doc.is_array() || doc.size() != 3) throw Error(ErrorKind::Protocol, "color must be [r, g, b]");
  return {doc[0].get<float>(), doc[1].get<float>(), doc[2].get<float>()};
}

namespace {

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& doc) {
  if (!doc.is_array() || doc.size() != 3) throw Error(ErrorKind::Protocol, "vector must be [x, y, z]");
  return {doc[0].get<double>(), doc[1].get<double>(), doc[2].get<double>()};
}

const char* kind_name(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::Box: return "box";
    case PrimitiveKind::Cylinder: return "cylinder";
    case PrimitiveKind::Sphere: return "sphere";
  }
  return "box";
}

PrimitiveKind kind_from_name(const std::string& name) {
  if (name == "box") return PrimitiveKind::Box;
  if (name == "cylinder") return PrimitiveKind::Cylinder;
  if (name == "sphere") return PrimitiveKind::Sphere;
  throw Error(ErrorKind::Protocol, "unknown primitive kind: " + name);
}

}  // namespace

json to_json(const Primitive& p) {
  json jp = {{"kind", kind_name(p.kind)}, {"center", vec_json(p.center)}, {"size", vec_json(p.size)},
             {"color", rgb_json(p.color)}};
  if (!p.tag.empty()) jp["tag"] = p.tag;
  return jp;
}

Primitive primitive_from_json(const json& jp) {
  try {
    Primitive p;
    p.kind = kind_from_name(jp.at("kind").get<std::string>());
    p.center = vec_from_json(jp.at("center"));
    p.size = vec_from_json(jp.at("size"));
    p.color = rgb_from_json(jp.at("color"));
    p.tag = jp.value("tag", std::string());
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed primitive: ") + e.what());
  }
}

json to_json(const Scene& scene) {
  json prims = json::array();
  for (const Primitive& p : scene.primitives) prims.push_back(to_json(p));
  return {
      {"schema", kSceneSchema},
      {"seed", scene.seed},
      {"params",
       {{"extent", scene.params.extent},
        {"density", scene.params.density},
        {"min_count", scene.params.min_count},
        {"max_count", scene.params.max_count},
        {"style", scene.params.style == SceneStyle::Geometry ? "geometry" : "low-texture"},
        {"spawn_radius", scene.params.spawn_radius},
        {"ground_tile", scene.params.ground_tile}}},
      {"sky_color", rgb_json(scene.sky_color)},
      {"ground",
       {{"height", scene.ground.height},
        {"color", rgb_json(scene.ground.color)},
        {"alt_color", rgb_json(scene.ground.alt_color)},
        {"tile_size", scene.ground.tile_size}}},
      {"camera_height", scene.camera_height},
      {"light_direction", vec_json(scene.light_direction)},
      {"primitives", std::move(prims)},
  };
}

Scene scene_from_json(const json& doc) {
  try {
    if (doc.value("schema", std::string()) != kSceneSchema) {
      throw Error(ErrorKind::Protocol, "unsupported scene schema");
    }
    Scene scene;
    scene.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("params")) {
      const json& p = doc.at("params");
      scene.params.extent = p.value("extent", scene.params.extent);
      scene.params.density = p.value("density", scene.params.density);
      scene.params.min_count = p.value("min_count", scene.params.min_count);
      scene.params.max_count = p.value("max_count", scene.params.max_count);
      scene.params.style = p.value("style", std::string("geometry")) == "low-texture"
                               ? SceneStyle::LowTexture
                               : SceneStyle::Geometry;
      scene.params.spawn_radius = p.value("spawn_radius", scene.params.spawn_radius);
      scene.params.ground_tile = p.value("ground_tile", scene.params.ground_tile);
    }
    scene.sky_color = rgb_from_json(doc.at("sky_color"));
    const json& g = doc.at("ground");
    scene.ground.height = g.at("height").get<double>();
    scene.ground.color = rgb_from_json(g.at("color"));
    scene.ground.alt_color = rgb_from_json(g.value("alt_color", rgb_json(scene.ground.color)));
    scene.ground.tile_size = g.value("tile_size", 0.0);
    scene.camera_height = doc.value("camera_height", kDefaultCameraHeight);
    if (doc.contains("light_direction")) {
      const Vec3 l = vec_from_json(doc.at("light_direction"));
      scene.light_direction = std::abs(l.norm() - 1.0) > 1e-12 ? l.normalized() : l;
    }
    for (const json& jp : doc.at("primitives")) scene.primitives.push_back(primitive_from_json(jp));
    return scene;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed scene document: ") + e.what());
  }
}

std::string serialize(const Scene& scene) { return to_json(scene).dump(2) + "\n"; }

json to_json(const Pose& pose) {
  return {{"x", pose.position.x()}, {"y", pose.position.y()}, {"z", pose.position.z()}, {"yaw", pose.yaw}};
}

Pose pose_from_json(const json& doc) {
  try {
    Pose p{{doc.at("x").get<double>(), doc.at("y").get<double>(), doc.at("z").get<double>()},
           doc.at("yaw").get<double>()};
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed pose: ") + e.what());
  }
}

}  // namespace panoworld::world
