#include "panoworld/world/collision.hpp"

#include "panoworld/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace panoworld::world {

namespace {

double point_segment_distance(double px, double pz, double ax, double az, double bx, double bz) {
  const double dx = bx - ax;
  const double dz = bz - az;
  const double len2 = dx * dx + dz * dz;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((px - ax) * dx + (pz - az) * dz) / len2, 0.0, 1.0);
  return std::hypot(px - (ax + t * dx), pz - (az + t * dz));
}

double point_rect_distance(double px, double pz, double x0, double z0, double x1, double z1) {
  const double dx = std::max({x0 - px, 0.0, px - x1});
  const double dz = std::max({z0 - pz, 0.0, pz - z1});
  return std::hypot(dx, dz);
}

// Liang-Barsky clip of the segment against the closed rectangle.
bool segment_hits_rect(double ax, double az, double bx, double bz, double x0, double z0, double x1, double z1) {
  double t0 = 0.0, t1 = 1.0;
  const double dx = bx - ax, dz = bz - az;
  const double p[4] = {-dx, dx, -dz, dz};
  const double q[4] = {ax - x0, x1 - ax, az - z0, z1 - az};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double r = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

double footprint_distance(const Primitive& prim, double ax, double az, double bx, double bz) {
  if (prim.kind == PrimitiveKind::Box) {
    const double x0 = prim.center.x() - 0.5 * prim.size.x();
    const double x1 = prim.center.x() + 0.5 * prim.size.x();
    const double z0 = prim.center.z() - 0.5 * prim.size.z();
    const double z1 = prim.center.z() + 0.5 * prim.size.z();
    if (segment_hits_rect(ax, az, bx, bz, x0, z0, x1, z1)) return 0.0;
    double d = std::min(point_rect_distance(ax, az, x0, z0, x1, z1), point_rect_distance(bx, bz, x0, z0, x1, z1));
    for (double cx : {x0, x1}) {
      for (double cz : {z0, z1}) d = std::min(d, point_segment_distance(cx, cz, ax, az, bx, bz));
    }
    return d;
  }
  const double d = point_segment_distance(prim.center.x(), prim.center.z(), ax, az, bx, bz);
  return std::max(d - prim.radius(), 0.0);
}

bool check_collision(const Scene& scene, const Vec3& from, const Vec3& to, double clearance) {
  if (!(clearance >= 0.0)) throw Error(ErrorKind::Domain, "clearance must be non-negative");
  const double column_top = std::max(from.y(), to.y());
  const double column_bottom = scene.ground.height;
  for (const Primitive& p : scene.primitives) {
    if (p.bottom() > column_top || p.top() < column_bottom) continue;
    if (footprint_distance(p, from.x(), from.z(), to.x(), to.z()) <= clearance) return true;
  }
  return false;
}

bool check_collision(const Scene& scene, const Pose& from, const Pose& to, double clearance) {
  return check_collision(scene, from.position, to.position, clearance);
}

}  // namespace panoworld::world
