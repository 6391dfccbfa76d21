#pragma once

#include "panoworld/explore/session.hpp"
#include "panoworld/world/collision.hpp"

#include <functional>
#include <random>

namespace panoworld::explore {

/// Closed polygonal walk. Leg 0 starts along the current heading (zero
/// turn); the final config is a zero-distance turn that restores the
/// starting orientation. rotation_count counts the non-zero turns, which
/// equals the number of polygon vertices.
struct LoopPath {
  std::vector<ExplorationConfig> legs;
  int rotation_count = 0;
  double total_distance = 0.0;

  /// Sum of leg displacement vectors, in the frame of the start heading.
  Vec3 closure_residual() const;
  double net_heading() const;
};

struct LoopBounds {
  int min_rotations = 2;
  int max_rotations = 9;
  double min_distance = 2.0;   // meters, total perimeter
  double max_distance = 20.0;
  double min_leg = 0.2;        // meters
  double min_turn = 0.1;       // radians; smaller turns are rejected
  double meters_per_frame = kMetersPerFrame;
  int max_attempts = 1000;
};

/// Random closed polygon: rotation count uniform in [min, max], perimeter
/// uniform in [min_distance, max_distance]. The closing leg is computed so
/// the displacement sums to zero. Throws ErrorKind::Sampling on infeasible
/// bounds or when no polygon passes the leg/turn limits.
LoopPath sample_loop_path(std::mt19937_64& rng, const LoopBounds& bounds = {});

/// Builds a path from absolute leg directions (relative to the start
/// heading) and lengths; the caller supplies a closed polygon.
LoopPath loop_from_polygon(const std::vector<double>& directions, const std::vector<double>& lengths,
                           double meters_per_frame = kMetersPerFrame);

enum class LoopStatus { Completed, Filtered };

struct LoopResult {
  LoopStatus status = LoopStatus::Completed;
  Panorama origin_view;
  Panorama final_view;
  Pose final_pose;
};

using SessionFactory = std::function<ExplorationSession()>;

/// Runs every leg through step() on a fresh session. When `reference` is
/// given, legs that collide in it (with `clearance`) filter the path before
/// any generation happens.
LoopResult execute_loop(const SessionFactory& make_session, const LoopPath& path,
                        const world::Scene* reference = nullptr, double clearance = world::kDefaultClearance);

/// True when any leg of `path` walked from `start` collides in `scene`.
bool loop_blocked(const world::Scene& scene, const Pose& start, const LoopPath& path, double clearance);

}  // namespace panoworld::explore
