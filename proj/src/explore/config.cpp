#include "panoworld/explore/config.hpp"

#include "panoworld/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace panoworld::explore {

ExplorationConfig ExplorationConfig::from_distance(double heading_change, double distance, double meters_per_frame) {
  if (!(meters_per_frame > 0.0)) throw Error(ErrorKind::Domain, "meters_per_frame must be positive");
  ExplorationConfig c;
  c.heading_change = heading_change;
  c.distance = distance;
  c.frame_count = std::max(1, static_cast<int>(std::lround(distance / meters_per_frame)));
  c.validate();
  return c;
}

void ExplorationConfig::validate() const {
  if (!std::isfinite(heading_change) || !std::isfinite(distance) || !std::isfinite(climb)) {
    throw Error(ErrorKind::Domain, "exploration config fields must be finite");
  }
  if (distance < 0.0) throw Error(ErrorKind::Domain, "distance must be non-negative");
  if (frame_count < 1) throw Error(ErrorKind::Domain, "frame_count must be >= 1");
}

Pose orient(const Pose& pose, const ExplorationConfig& config) {
  return {pose.position, geo::wrap_pi(pose.yaw + config.heading_change)};
}

Pose advance(const Pose& pose, const ExplorationConfig& config, double fraction) {
  const Pose turned = orient(pose, config);
  const Vec3 step = config.distance * turned.forward() + Vec3(0.0, config.climb, 0.0);
  return {turned.position + fraction * step, turned.yaw};
}

nlohmann::json to_json(const ExplorationConfig& config) {
  nlohmann::json j = {{"heading_change", config.heading_change},
                      {"distance", config.distance},
                      {"frame_count", config.frame_count}};
  if (config.climb != 0.0) j["climb"] = config.climb;
  return j;
}

ExplorationConfig config_from_json(const nlohmann::json& doc) {
  try {
    ExplorationConfig c;
    c.heading_change = doc.value("heading_change", 0.0);
    c.distance = doc.value("distance", 0.0);
    c.climb = doc.value("climb", 0.0);
    c.frame_count = doc.contains("frame_count")
                        ? doc.at("frame_count").get<int>()
                        : std::max(1, static_cast<int>(std::lround(c.distance / kMetersPerFrame)));
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed exploration config: ") + e.what());
  }
}

}  // namespace panoworld::explore
