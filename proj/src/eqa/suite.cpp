#include "panoworld/eqa/suite.hpp"

#include "panoworld/belief/perception.hpp"
#include "panoworld/belief/update.hpp"
#include "panoworld/common/error.hpp"
#include "panoworld/common/rng.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace panoworld::eqa {

namespace {

using belief::HypothesisSpace;
using belief::Slot;
using world::Primitive;
using world::PrimitiveKind;

enum class Kind { BlockedAmbulance, BlindCorner, OpenRoad, TaxiStop, Crossing };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::BlockedAmbulance: return "blocked-ambulance";
    case Kind::BlindCorner: return "blind-corner";
    case Kind::OpenRoad: return "open-road";
    case Kind::TaxiStop: return "taxi-stop";
    case Kind::Crossing: return "crossing";
  }
  return "";
}

bool uses_ambulance(Kind k) { return k == Kind::BlockedAmbulance || k == Kind::OpenRoad || k == Kind::TaxiStop; }
bool occluded(Kind k) { return k != Kind::OpenRoad; }
bool multi(Kind k) { return k == Kind::TaxiStop || k == Kind::Crossing; }

struct Layout {
  double wall_x, wall_height, wall_far_z;  // occluder spans z in [-0.5, wall_far_z]
  double hx, hz;                            // hidden object position
  double yaw_jitter;
  Rgb wall_color, body_color;
  bool low_texture;
};

Layout sample_layout(std::mt19937_64& rng, Kind kind, bool low_texture) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Layout l{};
  l.low_texture = low_texture;
  l.wall_x = 3.5 + 1.5 * u(rng);
  l.wall_height = 3.0 + 3.0 * u(rng);
  l.wall_far_z = 5.0 + 1.5 * u(rng);
  if (occluded(kind)) {
    l.hx = l.wall_x + 3.5 + 1.5 * u(rng);
    l.hz = 1.8 + 1.5 * u(rng);
  } else {
    l.hx = 9.0 + 3.0 * u(rng);
    l.hz = -1.0 + 2.0 * u(rng);
  }
  l.yaw_jitter = 0.3 * (u(rng) - 0.5);
  if (low_texture) {
    const float g = static_cast<float>(0.45 + 0.1 * u(rng));
    l.wall_color = {g, g, g};
    l.body_color = {0.7f, 0.7f, 0.7f};
  } else {
    l.wall_color = {static_cast<float>(0.5 + 0.3 * u(rng)), static_cast<float>(0.35 + 0.2 * u(rng)), 0.3f};
    l.body_color = {0.95f, 0.85f, 0.1f};
  }
  return l;
}

world::Scene base_scene(const Layout& l, Kind kind, const world::Pose& vantage, std::uint64_t seed) {
  world::Scene s;
  s.seed = seed;
  s.params.style = l.low_texture ? world::SceneStyle::LowTexture : world::SceneStyle::Geometry;
  s.ground.tile_size = l.low_texture ? 0.0 : 2.0;
  if (l.low_texture) {
    s.ground.color = {0.5f, 0.5f, 0.5f};
    s.sky_color = {0.8f, 0.8f, 0.8f};
  }
  if (occluded(kind)) {
    s.primitives.push_back({PrimitiveKind::Box,
                            {l.wall_x, 0.5 * l.wall_height, 0.5 * (l.wall_far_z - 0.5)},
                            {0.5, l.wall_height, l.wall_far_z + 0.5},
                            l.wall_color,
                            "building"});
  }
  // Background blocks behind the agent give the view some context.
  s.primitives.push_back({PrimitiveKind::Box, {-9.0, 2.0, -6.0}, {4.0, 4.0, 4.0}, l.wall_color, "building"});
  s.primitives.push_back({PrimitiveKind::Box, {-10.0, 3.0, 7.0}, {3.0, 6.0, 5.0}, l.wall_color, "building"});
  if (multi(kind)) {
    // Parked just behind the other agent's eye point.
    const double vx = vantage.position.x();
    const double vz = vantage.position.z();
    s.primitives.push_back({PrimitiveKind::Box, {vx, 0.7, vz - 1.2}, {1.8, 1.4, 2.2}, l.body_color,
                            kind == Kind::TaxiStop ? "taxi" : "car"});
  }
  return s;
}

Slot hazard_slot(const Layout& l, Kind kind) {
  if (uses_ambulance(kind)) {
    const Rgb white = l.low_texture ? Rgb{0.9f, 0.9f, 0.9f} : Rgb{0.95f, 0.95f, 0.95f};
    const Rgb red = l.low_texture ? Rgb{0.3f, 0.3f, 0.3f} : Rgb{0.9f, 0.1f, 0.1f};
    const Primitive body{PrimitiveKind::Box, {l.hx, 1.0, l.hz}, {3.0, 2.0, 2.0}, white, "ambulance"};
    Primitive front{PrimitiveKind::Box, {l.hx - 1.2, 2.2, l.hz}, {0.4, 0.4, 0.6}, red, "siren"};
    Primitive back = front;
    back.center.x() = l.hx + 1.2;
    return {"ambulance", {{"absent", {}}, {"toward", {body, front}}, {"away", {body, back}}}};
  }
  const Rgb coat = l.low_texture ? Rgb{0.25f, 0.25f, 0.25f} : Rgb{0.2f, 0.3f, 0.8f};
  const Primitive person{PrimitiveKind::Cylinder, {l.hx, 0.85, l.hz}, {0.6, 1.7, 0.6}, coat, "pedestrian"};
  return {"pedestrian", {{"absent", {}}, {"present", {person}}}};
}

// Correct action and reference reasoning per hazard value.
struct Outcome {
  const char* action;
  std::string rationale;
};

Outcome outcome(Kind kind, const std::string& value) {
  const std::string seen_by = kind == Kind::TaxiStop   ? "The taxi can see the cross street: "
                              : kind == Kind::Crossing ? "The waiting car can see past the wall: "
                                                       : "";
  if (value == "toward") {
    return {kYield, seen_by + "an ambulance is heading toward the intersection, so pull over and let it pass."};
  }
  if (value == "away") {
    return {kProceed, seen_by + "the ambulance is driving away from the intersection, so it is safe to proceed."};
  }
  if (value == "present") {
    return {kWait, seen_by + "a pedestrian is about to cross from behind the wall, so stop and wait."};
  }
  return {kProceed, seen_by + "nothing is coming, so it is safe to proceed."};
}

std::string context_for(Kind kind) {
  switch (kind) {
    case Kind::BlockedAmbulance:
      return "You are driving toward an intersection. A building on your right hides the cross street. "
             "You hear a siren but cannot tell where it comes from.";
    case Kind::BlindCorner:
      return "You are driving toward a corner. A wall on your right hides the sidewalk just past the corner, "
             "where a crosswalk begins.";
    case Kind::OpenRoad:
      return "You are driving on an open road with a clear view ahead. A siren is audible.";
    case Kind::TaxiStop:
      return "A taxi at the intersection ahead has stopped abruptly although the light is green. "
             "A building on your right hides the cross street from you, but the taxi can see it.";
    case Kind::Crossing:
      return "A car is waiting at the crossing ahead. It can see past the wall on your right; you cannot.";
  }
  return {};
}

// The two truths of a control pair.
std::array<const char*, 2> pair_values(Kind kind) {
  switch (kind) {
    case Kind::BlockedAmbulance:
    case Kind::OpenRoad: return {"toward", "away"};
    case Kind::TaxiStop: return {"toward", "absent"};
    default: return {"present", "absent"};
  }
}

bool all_distinct(const std::vector<Panorama>& views) {
  for (std::size_t a = 0; a < views.size(); ++a) {
    for (std::size_t b = a + 1; b < views.size(); ++b) {
      if (views[a] == views[b]) return false;
    }
  }
  return true;
}

bool all_equal(const std::vector<Panorama>& views) {
  return std::all_of(views.begin(), views.end(), [&](const Panorama& v) { return v == views.front(); });
}

bool verified(const std::shared_ptr<const HypothesisSpace>& space, Kind kind, const world::Pose& self,
              const world::Pose& vantage, int w, int h) {
  const belief::OraclePerception oracle(space);
  try {
    const auto own = oracle.predictions(self, w, h);
    if (occluded(kind)) {
      return all_equal(own) && all_distinct(oracle.predictions(vantage, w, h));
    }
    return all_distinct(own);
  } catch (const Error&) {
    return false;  // a pose inside a solid
  }
}

std::vector<Scenario> make_pair(Kind kind, int pair, bool low_texture, const SuiteOptions& opts) {
  const std::uint64_t pair_seed = derive_seed(opts.seed, static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(pair));
  std::mt19937_64 rng(pair_seed);
  for (int attempt = 0; attempt < 50; ++attempt) {
    const Layout l = sample_layout(rng, kind, low_texture);
    const world::Pose self{{0.0, world::kDefaultCameraHeight, 0.0}, l.yaw_jitter};
    const world::Pose vantage = occluded(kind)
                                    ? world::Pose{{l.wall_x + 2.0, world::kDefaultCameraHeight, -2.0}, geo::kHalfPi}
                                    : world::Pose{{3.0, world::kDefaultCameraHeight, 0.0}, 0.0};
    auto space = std::make_shared<const HypothesisSpace>(base_scene(l, kind, vantage, pair_seed),
                                                         std::vector<Slot>{hazard_slot(l, kind)});
    if (opts.verify && !verified(space, kind, self, vantage, opts.view_width, opts.view_height)) continue;

    std::array<std::string, 4> texts = {kProceed, kYield, kWait, kReverse};
    std::shuffle(texts.begin(), texts.end(), rng);
    std::vector<Choice> choices;
    for (int i = 0; i < 4; ++i) choices.push_back({std::string(1, static_cast<char>('A' + i)), texts[i]});
    const auto label_of = [&](const char* text) {
      for (const Choice& c : choices) {
        if (c.text == text) return c.label;
      }
      return std::string();
    };

    Scenario s;
    s.category = multi(kind) ? "multi-agent" : "single-agent";
    s.kind = kind_name(kind);
    s.space = space;
    s.self = self;
    if (multi(kind)) s.others.push_back({kind == Kind::TaxiStop ? "taxi" : "car", vantage});
    s.context = context_for(kind);
    s.choices = choices;
    const Slot& slot = space->slots().front();
    for (const auto& v : slot.values) {
      const Outcome o = outcome(kind, v.label);
      s.decision.push_back(label_of(o.action));
      s.rationale.push_back(o.rationale);
    }
    if (!multi(kind)) s.imagination = belief::path_to_pose(self, vantage);
    s.view_width = opts.view_width;
    s.view_height = opts.view_height;
    char pair_id[64];
    std::snprintf(pair_id, sizeof(pair_id), "%s-%03d", kind_name(kind), pair);
    s.control_pair = pair_id;

    std::vector<Scenario> out;
    for (const char* value : pair_values(kind)) {
      Scenario m = s;
      m.id = std::string(pair_id) + "-" + value;
      m.truth = {{slot.name, value}};
      const std::size_t t = m.truth_index();
      m.gold_choice = m.decision[t];
      m.gold_rationale = m.rationale[t];
      m.validate();
      out.push_back(std::move(m));
    }
    return out;
  }
  throw Error(ErrorKind::Sampling, std::string("no verifiable layout for ") + kind_name(kind));
}

}  // namespace

std::vector<Scenario> builtin_suite(const SuiteOptions& opts) {
  if (opts.single_pairs < 0 || opts.multi_pairs < 0) throw Error(ErrorKind::Domain, "negative pair count");
  std::vector<Scenario> suite;
  const std::array<Kind, 3> singles = {Kind::BlockedAmbulance, Kind::BlindCorner, Kind::OpenRoad};
  const std::array<Kind, 2> multis = {Kind::TaxiStop, Kind::Crossing};
  for (int p = 0; p < opts.single_pairs; ++p) {
    for (Scenario& s : make_pair(singles[p % 3], p, p % 2 == 1, opts)) suite.push_back(std::move(s));
  }
  for (int p = 0; p < opts.multi_pairs; ++p) {
    for (Scenario& s : make_pair(multis[p % 2], p, (p / 2) % 2 == 1, opts)) suite.push_back(std::move(s));
  }
  return suite;
}

}  // namespace panoworld::eqa
