#include "panoworld/world/render.hpp"

#include "panoworld/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace panoworld::world {

using geo::kHalfPi;
using geo::kPi;
using geo::kTwoPi;

Vec3 pixel_ray(double u, double v, int width, int height, double yaw) {
  const double phi = kTwoPi * u / width - kPi + yaw;
  const double theta = kHalfPi - kPi * v / height;
  const double ct = std::cos(theta);
  return {ct * std::cos(phi), std::sin(theta), ct * std::sin(phi)};
}

namespace {

void check_inputs(const Scene& scene, const Pose& pose, int width, int height, int supersample) {
  if (width < 1 || height < 1) throw Error(ErrorKind::Domain, "render size must be positive");
  if (supersample < 1) throw Error(ErrorKind::Domain, "supersample factor must be >= 1");
  if (!(pose.position.y() > scene.ground.height)) {
    throw Error(ErrorKind::Render, "camera is at or below the ground plane");
  }
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    if (scene.primitives[i].contains(pose.position)) {
      throw Error(ErrorKind::Render, "camera is inside primitive " + std::to_string(i));
    }
  }
}

// A primitive that may be visible in a pixel row, restricted to a wrapped
// column window [col0, col0 + ncols).
struct Candidate {
  int prim;
  int col0;
  int ncols;
};

// Conservative per-row candidate lists from each primitive's bounding sphere
// as seen from the eye. Lists keep scene order so ties resolve like the
// brute-force loop.
std::vector<std::vector<Candidate>> build_candidates(const Scene& scene, const Pose& pose, int width,
                                                     int height) {
  std::vector<std::vector<Candidate>> rows(static_cast<std::size_t>(height));
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    const Primitive& p = scene.primitives[i];
    const Vec3 rel = p.center - pose.position;
    const double dist = rel.norm();
    const double radius = p.bounding_radius() * (1.0 + 1e-9) + 1e-6;
    int row0 = 0, row1 = height - 1, col0 = 0, ncols = width;
    if (dist > radius * 1.001) {
      const double alpha = std::asin(radius / dist);
      const double theta_c = std::asin(std::clamp(rel.y() / dist, -1.0, 1.0));
      const double hi = theta_c + alpha;
      const double lo = theta_c - alpha;
      row0 = std::max(0, static_cast<int>(std::floor((kHalfPi - hi) * height / kPi)) - 1);
      row1 = std::min(height - 1, static_cast<int>(std::floor((kHalfPi - lo) * height / kPi)) + 1);
      if (hi < kHalfPi && lo > -kHalfPi) {
        const double dlon = std::asin(std::min(1.0, std::sin(alpha) / std::cos(std::abs(theta_c))));
        const double lon_c = std::atan2(rel.z(), rel.x());
        const double u_c = (lon_c - pose.yaw + kPi) * width / kTwoPi;
        const double half = dlon * width / kTwoPi + 1.5;
        const double span = std::ceil(2.0 * half) + 1.0;
        if (span < width) {
          ncols = static_cast<int>(span);
          const long long c0 = static_cast<long long>(std::floor(u_c - half));
          col0 = static_cast<int>(((c0 % width) + width) % width);
        }
      }
    }
    for (int r = row0; r <= row1; ++r) rows[static_cast<std::size_t>(r)].push_back({static_cast<int>(i), col0, ncols});
  }
  return rows;
}

Hit ground_hit(const Scene& scene, const Ray& ray) {
  Hit hit;
  if (ray.dir.y() < 0.0 && ray.origin.y() > scene.ground.height) {
    hit.t = (scene.ground.height - ray.origin.y()) / ray.dir.y();
    hit.ground = true;
    hit.normal = Vec3::UnitY();
  }
  return hit;
}

Hit trace_candidates(const Scene& scene, const Ray& ray, const std::vector<Candidate>& cands, int col,
                     int width) {
  Hit hit = ground_hit(scene, ray);
  for (const Candidate& c : cands) {
    if (c.ncols < width) {
      const int off = ((col - c.col0) % width + width) % width;
      if (off >= c.ncols) continue;
    }
    double t = 0.0;
    Vec3 n;
    if (intersect(scene.primitives[static_cast<std::size_t>(c.prim)], ray, hit.t, t, n)) {
      hit.t = t;
      hit.normal = n;
      hit.primitive = c.prim;
      hit.ground = false;
    }
  }
  return hit;
}

template <typename Trace>
Rgb pixel_color(const Scene& scene, const Pose& pose, int col, int row, int width, int height, int s,
                Trace&& trace) {
  double r = 0.0, g = 0.0, b = 0.0;
  for (int sy = 0; sy < s; ++sy) {
    for (int sx = 0; sx < s; ++sx) {
      const double u = col + (sx + 0.5) / s;
      const double v = row + (sy + 0.5) / s;
      const Ray ray{pose.position, pixel_ray(u, v, width, height, pose.yaw)};
      const Rgb c = shade(scene, ray, trace(ray));
      r += c.r;
      g += c.g;
      b += c.b;
    }
  }
  const double inv = 1.0 / (s * s);
  return {quantize8(static_cast<float>(r * inv)), quantize8(static_cast<float>(g * inv)),
          quantize8(static_cast<float>(b * inv))};
}

}  // namespace

Panorama render_panorama(const Scene& scene, const Pose& pose, int width, int height,
                         const RenderOptions& options) {
  check_inputs(scene, pose, width, height, options.supersample);
  const auto rows = build_candidates(scene, pose, width, height);
  Panorama out(width, height);
  const int s = options.supersample;
  // Supersampled rays stay inside the pixel, so row lists remain conservative.
#pragma omp parallel for schedule(dynamic, 4) if (options.exec == Exec::Parallel)
  for (int row = 0; row < height; ++row) {
    const auto& cands = rows[static_cast<std::size_t>(row)];
    auto dst = out.row(row);
    for (int col = 0; col < width; ++col) {
      dst[static_cast<std::size_t>(col)] = pixel_color(scene, pose, col, row, width, height, s, [&](const Ray& ray) {
        return trace_candidates(scene, ray, cands, col, width);
      });
    }
  }
  return out;
}

Panorama render_panorama_reference(const Scene& scene, const Pose& pose, int width, int height,
                                   int supersample) {
  check_inputs(scene, pose, width, height, supersample);
  Panorama out(width, height);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      out.at(col, row) = pixel_color(scene, pose, col, row, width, height, supersample,
                                     [&](const Ray& ray) { return cast_ray(scene, ray); });
    }
  }
  return out;
}

double ray_depth(const Scene& scene, const Pose& pose, const geo::SphericalCoord& view) {
  check_inputs(scene, pose, 1, 1, 1);
  const Vec3 d = geo::to_direction({view.phi + pose.yaw, view.theta});
  return cast_ray(scene, {pose.position, d}).t;
}

DepthMap render_depth(const Scene& scene, const Pose& pose, int width, int height, Exec exec) {
  check_inputs(scene, pose, width, height, 1);
  const auto rows = build_candidates(scene, pose, width, height);
  DepthMap depth(width, height, kInfiniteDepth);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::Parallel)
  for (int row = 0; row < height; ++row) {
    const auto& cands = rows[static_cast<std::size_t>(row)];
    for (int col = 0; col < width; ++col) {
      const Ray ray{pose.position, pixel_ray(col + 0.5, row + 0.5, width, height, pose.yaw)};
      depth.at(col, row) = trace_candidates(scene, ray, cands, col, width).t;
    }
  }
  return depth;
}

}  // namespace panoworld::world
