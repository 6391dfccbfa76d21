#pragma once

#include "panoworld/world/collision.hpp"
#include "panoworld/world/scene.hpp"

#include <random>
#include <vector>

namespace panoworld::world {

struct PathOptions {
  double length = 20.0;  // meters
  int frame_count = 50;
  double clearance = kDefaultClearance;
  int max_retries = 1000;
  /// Start positions are drawn from [-extent, extent]^2; <= 0 uses the scene extent.
  double extent = 0.0;
};

/// Straight constant-velocity walk: frame_count poses spaced
/// length / (frame_count - 1) apart along the start heading.
struct PathSample {
  Pose start;
  double length = 0.0;
  int frame_count = 0;
  std::vector<Pose> poses;

  double spacing() const { return frame_count > 1 ? length / (frame_count - 1) : 0.0; }
};

/// Poses along a straight line from `start`; no collision checking.
PathSample straight_path(const Pose& start, double length, int frame_count);

/// Rejection-samples a uniformly random start position and heading whose
/// whole path is collision-free. Throws ErrorKind::NoFreePath after
/// `max_retries` rejected draws.
PathSample sample_straight_path(const Scene& scene, std::mt19937_64& rng, const PathOptions& options = {});

}  // namespace panoworld::world
