#include "panoworld/explore/goal.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/http_json.hpp"
#include "panoworld/common/image_io.hpp"
#include "panoworld/world/collision.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace panoworld::explore {

using nlohmann::json;

namespace {

double rad_to_deg(double r) { return r * 180.0 / geo::kPi; }
double deg_to_rad(double d) { return d * geo::kPi / 180.0; }

[[noreturn]] void pilot_error(const std::string& why, const std::string& raw) {
  throw Error(ErrorKind::Pilot, "pilot protocol violation: " + why, raw);
}

}  // namespace

PilotDecision parse_pilot_response(const std::string& raw, double meters_per_frame) {
  const auto open = raw.find('{');
  const auto close = raw.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) pilot_error("no JSON object", raw);
  const json doc = json::parse(raw.substr(open, close - open + 1), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) pilot_error("unparseable JSON", raw);
  const auto action = doc.find("action");
  if (action == doc.end() || !action->is_string()) pilot_error("missing action", raw);
  PilotDecision d;
  if (*action == "stop") {
    d.stop = true;
    return d;
  }
  if (*action != "move") pilot_error("unknown action " + action->dump(), raw);
  // turn_rad, when present, is exact; turn_deg is the human-facing field.
  const auto turn_rad = doc.find("turn_rad");
  const auto turn = doc.find("turn_deg");
  const auto dist = doc.find("distance_m");
  const bool has_rad = turn_rad != doc.end() && turn_rad->is_number();
  if ((!has_rad && (turn == doc.end() || !turn->is_number())) || dist == doc.end() || !dist->is_number()) {
    pilot_error("move needs numeric turn_deg and distance_m", raw);
  }
  try {
    const double heading = has_rad ? turn_rad->get<double>() : deg_to_rad(turn->get<double>());
    d.config = ExplorationConfig::from_distance(heading, dist->get<double>(), meters_per_frame);
    if (const auto frames = doc.find("frames"); frames != doc.end()) {
      if (!frames->is_number_integer()) pilot_error("frames must be an integer", raw);
      d.config.frame_count = frames->get<int>();
      d.config.validate();
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Pilot) throw;
    pilot_error(e.what(), raw);
  }
  return d;
}

std::string format_move(double turn_rad, double distance_m) {
  return json{{"action", "move"}, {"turn_deg", rad_to_deg(turn_rad)}, {"turn_rad", turn_rad}, {"distance_m", distance_m}}
      .dump();
}

std::string format_stop() { return json{{"action", "stop"}}.dump(); }

GoalOutcome run_goal_driven(ExplorationSession& session, const std::string& goal, Pilot& pilot, int budget,
                            int face_size) {
  if (budget < 0) throw Error(ErrorKind::Domain, "step budget must be non-negative");
  GoalOutcome out;
  out.status = GoalStatus::BudgetExhausted;
  for (int step = 0; step <= budget; ++step) {
    const geo::CubeMap views = geo::panorama_to_cubemap(session.current_view(), face_size);
    const PilotObservation obs{goal, views, step, budget - step, session};
    std::string raw = pilot.next(obs);
    const PilotDecision decision = parse_pilot_response(raw);
    out.responses.push_back(std::move(raw));
    if (decision.stop) {
      out.status = GoalStatus::Stopped;
      break;
    }
    if (step == budget) break;  // a move beyond the budget is not executed
    session.step(decision.config);
    out.trajectory.push_back(decision.config);
  }
  out.final_view = session.current_view();
  out.final_pose = session.imagined_pose();
  return out;
}

std::string ScriptedPilot::next(const PilotObservation&) {
  if (cursor_ >= script_.size()) return format_stop();
  const ExplorationConfig& c = script_[cursor_++];
  json j = {{"action", "move"},          {"turn_deg", rad_to_deg(c.heading_change)}, {"turn_rad", c.heading_change},
            {"distance_m", c.distance}, {"frames", c.frame_count}};
  return j.dump();
}

std::string RawPilot::next(const PilotObservation&) {
  if (cursor_ >= replies_.size()) return format_stop();
  return replies_[cursor_++];
}

double footprint_distance_to(const world::Primitive& prim, const Vec3& p) {
  return world::footprint_distance(prim, p.x(), p.z(), p.x(), p.z());
}

TargetPilot::TargetPilot(std::shared_ptr<const world::Scene> scene, int target, double arrive, double max_leg)
    : scene_(std::move(scene)), target_(target), arrive_(arrive), max_leg_(max_leg) {
  if (!scene_ || target_ < 0 || target_ >= static_cast<int>(scene_->primitives.size())) {
    throw Error(ErrorKind::Domain, "target pilot needs a valid target primitive");
  }
}

std::string TargetPilot::next(const PilotObservation& obs) {
  const world::Primitive& prim = scene_->primitives[static_cast<std::size_t>(target_)];
  const Pose& pose = obs.session.imagined_pose();
  const double gap = footprint_distance_to(prim, pose.position);
  if (gap <= arrive_) return format_stop();
  const double dx = prim.center.x() - pose.position.x();
  const double dz = prim.center.z() - pose.position.z();
  const double turn = geo::wrap_pi(std::atan2(dz, dx) - pose.yaw);
  // Aim to stop half the arrival radius short of the footprint.
  const double leg = std::min(max_leg_, gap - 0.5 * arrive_);
  return format_move(turn, std::max(leg, 0.0));
}

int resolve_goal_target(const world::Scene& scene, const std::string& goal) {
  std::string g = goal;
  std::transform(g.begin(), g.end(), g.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
    const std::string& tag = scene.primitives[i].tag;
    if (!tag.empty() && g.find(tag) != std::string::npos) return static_cast<int>(i);
  }
  static const std::pair<const char*, Rgb> kColors[] = {
      {"red", {1, 0, 0}}, {"green", {0, 1, 0}}, {"blue", {0, 0, 1}}, {"yellow", {1, 1, 0}}, {"white", {1, 1, 1}}, {"black", {0, 0, 0}}};
  static const std::pair<const char*, world::PrimitiveKind> kKinds[] = {
      {"box", world::PrimitiveKind::Box}, {"cylinder", world::PrimitiveKind::Cylinder}, {"sphere", world::PrimitiveKind::Sphere}};
  for (const auto& [cname, crgb] : kColors) {
    for (const auto& [kname, kind] : kKinds) {
      if (g.find(std::string(cname) + " " + kname) == std::string::npos) continue;
      int best = -1;
      double best_d = 1e300;
      for (std::size_t i = 0; i < scene.primitives.size(); ++i) {
        const auto& p = scene.primitives[i];
        if (p.kind != kind) continue;
        const double d = std::pow(p.color.r - crgb.r, 2) + std::pow(p.color.g - crgb.g, 2) + std::pow(p.color.b - crgb.b, 2);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(i);
        }
      }
      if (best >= 0 && best_d < 0.5) return best;
    }
  }
  return -1;
}

std::string HttpPilot::next(const PilotObservation& obs) {
  json faces = json::object();
  for (geo::Face f : geo::kAllFaces) {
    faces[std::string(geo::face_name(f))] = io::base64_encode(io::encode_png(obs.views.face(f)));
  }
  const json request = {{"goal", obs.goal},
                        {"step", obs.step},
                        {"budget_remaining", obs.budget_remaining},
                        {"reply_format", R"({"action":"move","turn_deg":..,"distance_m":..} or {"action":"stop"})"},
                        {"views", std::move(faces)}};
  const json reply = net::post_json(url_, request);
  if (!reply.contains("text") || !reply["text"].is_string()) {
    throw Error(ErrorKind::Pilot, "pilot endpoint reply lacks a text field", reply.dump());
  }
  return reply["text"].get<std::string>();
}

}  // namespace panoworld::explore
