#include "panoworld/world/raycast.hpp"

#include <algorithm>
#include <cmath>

namespace panoworld::world {

namespace {

bool intersect_box(const Primitive& p, const Ray& ray, double t_max, double& t_out, Vec3& n_out) {
  const Vec3 lo = p.center - 0.5 * p.size;
  const Vec3 hi = p.center + 0.5 * p.size;
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  int axis = -1;
  double sign = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double o = ray.origin[a];
    const double d = ray.dir[a];
    if (d == 0.0) {
      if (o < lo[a] || o > hi[a]) return false;
      continue;
    }
    double t0 = (lo[a] - o) / d;
    double t1 = (hi[a] - o) / d;
    double s = -1.0;
    if (t0 > t1) {
      std::swap(t0, t1);
      s = 1.0;
    }
    if (t0 > t_enter) {
      t_enter = t0;
      axis = a;
      sign = s;
    }
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return false;
  }
  if (axis < 0 || !(t_enter > kRayEpsilon) || !(t_enter < t_max)) return false;
  t_out = t_enter;
  n_out = Vec3::Zero();
  n_out[axis] = sign;
  return true;
}

bool intersect_cylinder(const Primitive& p, const Ray& ray, double t_max, double& t_out, Vec3& n_out) {
  const double r = p.radius();
  const double y0 = p.center.y() - 0.5 * p.size.y();
  const double y1 = p.center.y() + 0.5 * p.size.y();
  const double ox = ray.origin.x() - p.center.x();
  const double oz = ray.origin.z() - p.center.z();
  const double dx = ray.dir.x();
  const double dz = ray.dir.z();
  bool found = false;
  double best = t_max;

  const double a = dx * dx + dz * dz;
  if (a > 0.0) {
    const double b = ox * dx + oz * dz;
    const double c = ox * ox + oz * oz - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double t = (-b - std::sqrt(disc)) / a;
      if (t > kRayEpsilon && t < best) {
        const double y = ray.origin.y() + t * ray.dir.y();
        if (y >= y0 && y <= y1) {
          best = t;
          found = true;
          n_out = Vec3(ox + t * dx, 0.0, oz + t * dz) / r;
        }
      }
    }
  }
  if (ray.dir.y() != 0.0) {
    for (double plane : {y0, y1}) {
      const double t = (plane - ray.origin.y()) / ray.dir.y();
      if (!(t > kRayEpsilon && t < best)) continue;
      const double px = ox + t * dx;
      const double pz = oz + t * dz;
      if (px * px + pz * pz > r * r) continue;
      // Only the face pointing toward the ray can be entered from outside.
      const double ny = plane == y1 ? 1.0 : -1.0;
      if (ny * ray.dir.y() >= 0.0) continue;
      best = t;
      found = true;
      n_out = Vec3(0.0, ny, 0.0);
    }
  }
  if (found) t_out = best;
  return found;
}

bool intersect_sphere(const Primitive& p, const Ray& ray, double t_max, double& t_out, Vec3& n_out) {
  const double r = p.radius();
  const Vec3 oc = ray.origin - p.center;
  const double b = oc.dot(ray.dir);
  const double c = oc.squaredNorm() - r * r;
  if (c < 0.0) return false;
  const double disc = b * b - c;
  if (disc < 0.0) return false;
  const double t = -b - std::sqrt(disc);
  if (!(t > kRayEpsilon && t < t_max)) return false;
  t_out = t;
  n_out = (oc + t * ray.dir) / r;
  return true;
}

}  // namespace

bool intersect(const Primitive& prim, const Ray& ray, double t_max, double& t_out, Vec3& normal_out) {
  switch (prim.kind) {
    case PrimitiveKind::Box: return intersect_box(prim, ray, t_max, t_out, normal_out);
    case PrimitiveKind::Cylinder: return intersect_cylinder(prim, ray, t_max, t_out, normal_out);
    case PrimitiveKind::Sphere: return intersect_sphere(prim, ray, t_max, t_out, normal_out);
  }
  return false;
}

Hit cast_ray(const Scene& scene, const Ray& ray) {
  Hit hit;
  if (ray.dir.y() < 0.0 && ray.origin.y() > scene.ground.height) {
    hit.t = (scene.ground.height - ray.origin.y()) / ray.dir.y();
    hit.ground = true;
    hit.normal = Vec3::UnitY();
  }
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    double t = 0.0;
    Vec3 n;
    if (intersect(scene.primitives[i], ray, hit.t, t, n)) {
      hit.t = t;
      hit.normal = n;
      hit.primitive = static_cast<int>(i);
      hit.ground = false;
    }
  }
  return hit;
}

Rgb shade(const Scene& scene, const Ray& ray, const Hit& hit) {
  if (!hit.valid()) return scene.sky_color;
  if (hit.ground) {
    const Ground& g = scene.ground;
    if (g.tile_size <= 0.0) return g.color;
    const Vec3 p = ray.origin + hit.t * ray.dir;
    const auto ix = static_cast<long long>(std::floor(p.x() / g.tile_size));
    const auto iz = static_cast<long long>(std::floor(p.z() / g.tile_size));
    return ((ix + iz) & 1) == 0 ? g.color : g.alt_color;
  }
  const Primitive& prim = scene.primitives[static_cast<std::size_t>(hit.primitive)];
  const double lambert = std::max(0.0, hit.normal.dot(scene.light_direction));
  return prim.color * static_cast<float>(0.4 + 0.6 * lambert);
}

}  // namespace panoworld::world
