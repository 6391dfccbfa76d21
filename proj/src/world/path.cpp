#include "panoworld/world/path.hpp"

#include "panoworld/common/error.hpp"

#include <string>

namespace panoworld::world {

PathSample straight_path(const Pose& start, double length, int frame_count) {
  if (frame_count < 1) throw Error(ErrorKind::Domain, "frame_count must be >= 1");
  if (!(length >= 0.0)) throw Error(ErrorKind::Domain, "path length must be non-negative");
  PathSample path;
  path.start = start;
  path.length = length;
  path.frame_count = frame_count;
  const Vec3 fwd = start.forward();
  path.poses.reserve(static_cast<std::size_t>(frame_count));
  for (int k = 0; k < frame_count; ++k) {
    const double s = frame_count > 1 ? length * k / (frame_count - 1) : 0.0;
    path.poses.push_back({start.position + s * fwd, start.yaw});
  }
  return path;
}

PathSample sample_straight_path(const Scene& scene, std::mt19937_64& rng, const PathOptions& options) {
  if (options.max_retries < 1) throw Error(ErrorKind::Domain, "max_retries must be >= 1");
  const double extent = options.extent > 0.0 ? options.extent : scene.params.extent;
  std::uniform_real_distribution<double> pos(-extent, extent);
  std::uniform_real_distribution<double> heading(-geo::kPi, geo::kPi);
  for (int attempt = 0; attempt < options.max_retries; ++attempt) {
    const double x = pos(rng);
    const double z = pos(rng);
    const Pose start = eye_pose(scene, x, z, heading(rng));
    PathSample path = straight_path(start, options.length, options.frame_count);
    if (!check_collision(scene, path.poses.front(), path.poses.back(), options.clearance)) return path;
  }
  throw Error(ErrorKind::NoFreePath,
              "no collision-free path found after " + std::to_string(options.max_retries) + " attempts");
}

}  // namespace panoworld::world
