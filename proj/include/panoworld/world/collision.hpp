#pragma once

#include "panoworld/world/scene.hpp"

namespace panoworld::world {

inline constexpr double kDefaultClearance = 0.5;

/// Agent collision is 2.5D: the agent is a vertical column of radius
/// `clearance` from the ground to eye height. A primitive blocks the swept
/// segment when its footprint comes within `clearance` (inclusive) of the
/// segment in the ground plane and it overlaps the column vertically.
bool check_collision(const Scene& scene, const Vec3& from, const Vec3& to, double clearance = kDefaultClearance);
bool check_collision(const Scene& scene, const Pose& from, const Pose& to, double clearance = kDefaultClearance);

/// Ground-plane distance between segment (ax, az)-(bx, bz) and the footprint
/// of `prim` (rectangle for boxes, disk otherwise); 0 when they intersect.
double footprint_distance(const Primitive& prim, double ax, double az, double bx, double bz);

}  // namespace panoworld::world
