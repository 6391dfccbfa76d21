#pragma once

#include "panoworld/world/scene.hpp"

#include <json.hpp>

namespace panoworld::explore {

using world::Pose;
using world::Vec3;

/// Navigation semantics: one generated frame corresponds to 0.4 m of travel.
inline constexpr double kMetersPerFrame = 0.4;

/// One imaginative action: turn by heading_change, then move `distance`
/// along the new heading while generating frame_count frames. `climb` adds
/// vertical motion (used for bird's-eye views).
struct ExplorationConfig {
  double heading_change = 0.0;  // radians, positive turns right
  double distance = 0.0;        // meters
  int frame_count = 1;
  double climb = 0.0;           // meters, +Y

  /// frame_count = max(1, round(distance / meters_per_frame)).
  static ExplorationConfig from_distance(double heading_change, double distance,
                                         double meters_per_frame = kMetersPerFrame);

  /// Throws ErrorKind::Domain for negative distance, frame_count < 1 or
  /// non-finite fields.
  void validate() const;

  friend bool operator==(const ExplorationConfig&, const ExplorationConfig&) = default;
};

/// Pose after turning by config.heading_change and covering `fraction` of
/// the leg. fraction = 1 gives the dead-reckoned end pose exactly.
Pose advance(const Pose& pose, const ExplorationConfig& config, double fraction = 1.0);

/// Pose after only the orientation update.
Pose orient(const Pose& pose, const ExplorationConfig& config);

nlohmann::json to_json(const ExplorationConfig& config);
ExplorationConfig config_from_json(const nlohmann::json& doc);

}  // namespace panoworld::explore
