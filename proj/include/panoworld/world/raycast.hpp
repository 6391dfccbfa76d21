#pragma once

#include "panoworld/world/scene.hpp"

#include <limits>

namespace panoworld::world {

struct Ray {
  Vec3 origin;
  Vec3 dir;  // unit length
};

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  Vec3 normal = Vec3::Zero();
  int primitive = -1;  // index into Scene::primitives; -1 for ground or sky
  bool ground = false;

  bool valid() const { return t < std::numeric_limits<double>::infinity(); }
};

/// Nearest intersection with t in (kRayEpsilon, t_max). Origins inside the
/// solid see no surface.
bool intersect(const Primitive& prim, const Ray& ray, double t_max, double& t_out, Vec3& normal_out);

inline constexpr double kRayEpsilon = 1e-9;

/// Brute-force nearest hit over the ground plane and every primitive.
Hit cast_ray(const Scene& scene, const Ray& ray);

/// Color seen along a ray that produced `hit` (sky when invalid).
Rgb shade(const Scene& scene, const Ray& ray, const Hit& hit);

}  // namespace panoworld::world
