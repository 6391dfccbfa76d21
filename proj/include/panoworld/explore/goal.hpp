#pragma once

#include "panoworld/explore/session.hpp"
#include "panoworld/geometry/cubemap.hpp"

#include <memory>
#include <string>
#include <vector>

namespace panoworld::explore {

/// What the pilot sees before each decision.
struct PilotObservation {
  const std::string& goal;
  const geo::CubeMap& views;  // cube faces of the current view
  int step = 0;
  int budget_remaining = 0;
  const ExplorationSession& session;
};

/// High-level planner. Returns raw text holding one JSON object:
///   {"action": "move", "turn_deg": <deg>, "distance_m": <m>[, "frames": n]}
///   {"action": "stop"}
/// An optional "turn_rad" overrides turn_deg when exactness matters.
class Pilot {
 public:
  virtual ~Pilot() = default;
  virtual std::string next(const PilotObservation& observation) = 0;
  virtual std::string name() const = 0;
};

struct PilotDecision {
  bool stop = false;
  ExplorationConfig config;
};

/// Parses a pilot reply. The first {...} span is read as JSON. Throws
/// ErrorKind::Pilot with the raw text attached as the error detail.
PilotDecision parse_pilot_response(const std::string& raw, double meters_per_frame = kMetersPerFrame);

std::string format_move(double turn_rad, double distance_m);
std::string format_stop();

enum class GoalStatus { Stopped, BudgetExhausted };

struct GoalOutcome {
  GoalStatus status = GoalStatus::Stopped;
  std::vector<ExplorationConfig> trajectory;
  std::vector<std::string> responses;  // raw pilot text per decision
  Panorama final_view;
  Pose final_pose;
};

/// Pilot loop: observe, decide, step, until STOP or `budget` steps.
GoalOutcome run_goal_driven(ExplorationSession& session, const std::string& goal, Pilot& pilot, int budget,
                            int face_size = 128);

/// Replays a fixed list of configs, then stops.
class ScriptedPilot : public Pilot {
 public:
  explicit ScriptedPilot(std::vector<ExplorationConfig> script) : script_(std::move(script)) {}
  std::string next(const PilotObservation& observation) override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<ExplorationConfig> script_;
  std::size_t cursor_ = 0;
};

/// Emits fixed raw strings in order; for protocol tests.
class RawPilot : public Pilot {
 public:
  explicit RawPilot(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string next(const PilotObservation& observation) override;
  std::string name() const override { return "raw"; }

 private:
  std::vector<std::string> replies_;
  std::size_t cursor_ = 0;
};

/// Oracle-aware pilot: reads the target's true position from the scene and
/// heads for it in legs of at most `max_leg` meters, stopping once within
/// `arrive` meters of the target footprint.
class TargetPilot : public Pilot {
 public:
  TargetPilot(std::shared_ptr<const world::Scene> scene, int target, double arrive = 1.0, double max_leg = 4.0);
  std::string next(const PilotObservation& observation) override;
  std::string name() const override { return "target"; }

 private:
  std::shared_ptr<const world::Scene> scene_;
  int target_;
  double arrive_;
  double max_leg_;
};

/// Index of the primitive the goal text refers to: a tag contained in the
/// goal, else a "<color> <kind>" phrase. -1 when nothing matches.
int resolve_goal_target(const world::Scene& scene, const std::string& goal);

/// Ground-plane distance from a point to a primitive footprint.
double footprint_distance_to(const world::Primitive& prim, const Vec3& point);

/// Posts the observation (goal, step, budget, base64 PNG cube faces) to an
/// HTTP endpoint and returns its "text" field verbatim.
class HttpPilot : public Pilot {
 public:
  explicit HttpPilot(std::string url) : url_(std::move(url)) {}
  std::string next(const PilotObservation& observation) override;
  std::string name() const override { return "http"; }

 private:
  std::string url_;
};

}  // namespace panoworld::explore
