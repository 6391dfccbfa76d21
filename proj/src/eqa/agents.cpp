#include "panoworld/eqa/agents.hpp"

#include "panoworld/belief/policy.hpp"
#include "panoworld/belief/update.hpp"
#include "panoworld/common/error.hpp"
#include "panoworld/common/http_json.hpp"
#include "panoworld/common/image_io.hpp"
#include "panoworld/common/rng.hpp"
#include "panoworld/geometry/cubemap.hpp"

#include <cmath>
#include <random>

namespace panoworld::eqa {

using nlohmann::json;

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::Unimodal: return "unimodal";
    case Mode::Multimodal: return "multimodal";
    case Mode::Imagination: return "imagination";
  }
  return "";
}

Mode mode_from_name(std::string_view name) {
  if (name == "unimodal") return Mode::Unimodal;
  if (name == "multimodal") return Mode::Multimodal;
  if (name == "imagination") return Mode::Imagination;
  throw Error(ErrorKind::Usage, "unknown mode " + std::string(name));
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

AgentResponse RandomAgent::respond(const AgentInput& input) const {
  std::mt19937_64 rng(derive_seed(seed_, fnv1a(input.scenario.id)));
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(input.scenario.choices.size());
  double total = 0.0;
  for (double& v : p) total += (v = e(rng));
  for (double& v : p) v /= total;
  return {p, "random guess", json{{"distribution", p}}};
}

AgentResponse OmniscientAgent::respond(const AgentInput& input) const {
  const Scenario& s = input.scenario;
  std::vector<double> p(s.choices.size(), 0.0);
  p[static_cast<std::size_t>(s.choice_index(s.gold_choice))] = 1.0;
  return {p, s.gold_rationale, json{{"choice", s.gold_choice}}};
}

RuleAgent::RuleAgent(std::string perception) : perception_(std::move(perception)) {
  if (perception_ != "oracle" && perception_ != "probabilistic") {
    throw Error(ErrorKind::Usage, "unknown perception " + perception_);
  }
}

std::unique_ptr<belief::ObservationModel> RuleAgent::model_for(const Scenario& s) const {
  if (perception_ == "probabilistic") return std::make_unique<belief::ProbabilisticPerception>(s.space);
  return std::make_unique<belief::OraclePerception>(s.space);
}

AgentResponse RuleAgent::respond(const AgentInput& input) const {
  const Scenario& s = input.scenario;
  const auto model = model_for(s);
  belief::Belief own = belief::Belief::uniform(s.space->size());
  if (input.mode != Mode::Unimodal) {
    if (!input.egocentric) throw Error(ErrorKind::Policy, "rule agent needs the egocentric view in this mode");
    own = belief::physical_update(own, *input.egocentric, *model);
  }
  std::vector<belief::Belief> beliefs{own};
  json trace = json::array();
  if (input.mode == Mode::Imagination) {
    if (!input.session) throw Error(ErrorKind::Policy, "rule agent needs a world model session");
    if (s.others.empty()) {
      beliefs[0] = belief::imaginative_update(own, *input.session, s.imagination, *model).belief;
      trace.push_back({{"source", "self"}, {"belief", belief::dump(*s.space, beliefs[0])}});
    } else {
      for (const OtherAgent& o : s.others) {
        const belief::Belief prior =
            o.prior.empty() ? belief::Belief::uniform(s.space->size()) : belief::Belief::from_weights(o.prior);
        const auto inferred = belief::infer_other_agent(prior, *input.session, o.pose, *model);
        beliefs.push_back(inferred.belief);
        trace.push_back({{"source", o.name}, {"belief", belief::dump(*s.space, inferred.belief)}});
      }
    }
  }
  std::vector<std::string> labels;
  for (const Choice& c : s.choices) labels.push_back(c.label);
  std::vector<int> table;
  for (const std::string& d : s.decision) table.push_back(s.choice_index(d));
  const belief::DecisionTablePolicy policy(labels, table);
  const belief::Decision decision = belief::multi_agent_decide(beliefs, belief::Goal{s.context}, policy);

  const belief::Belief pooled = belief::aggregate_beliefs(beliefs);
  const std::size_t map = pooled.argmax();
  std::string rationale;
  if (pooled[map] > 1.0 - 1e-9 && !s.rationale.empty()) {
    rationale = s.rationale[map];
  } else {
    rationale = "Uncertain; most likely " + s.space->id(map) + " (p = " + std::to_string(pooled[map]) + ").";
  }
  return {decision.distribution.probabilities, rationale,
          json{{"belief", belief::dump(*s.space, pooled)}, {"imagined", trace}, {"choice", decision.action}}};
}

json encode_faces(const Panorama& view, int face_size) {
  const geo::CubeMap cube = geo::panorama_to_cubemap(view, face_size);
  json faces = json::object();
  for (geo::Face f : geo::kAllFaces) {
    faces[std::string(geo::face_name(f))] = io::base64_encode(io::encode_png(cube.face(f)));
  }
  return faces;
}

AgentResponse HttpAgent::parse_reply(const Scenario& s, const json& reply) {
  const auto bad = [&](const std::string& why) { throw Error(ErrorKind::Policy, "agent reply " + why, reply.dump()); };
  if (!reply.is_object()) bad("is not an object");
  std::vector<double> p(s.choices.size(), 0.0);
  if (reply.contains("distribution")) {
    const json& d = reply["distribution"];
    if (!d.is_object()) bad("distribution is not an object");
    for (const auto& [label, value] : d.items()) {
      const int i = s.choice_index(label);
      if (i < 0) bad("names unknown choice " + label);
      if (!value.is_number()) bad("has a non-numeric probability");
      p[static_cast<std::size_t>(i)] = value.get<double>();
    }
  } else if (reply.contains("choice") && reply["choice"].is_string()) {
    const int i = s.choice_index(reply["choice"].get<std::string>());
    if (i < 0) bad("names unknown choice");
    p[static_cast<std::size_t>(i)] = 1.0;
  } else {
    bad("has neither distribution nor choice");
  }
  std::string rationale;
  if (reply.contains("rationale") && reply["rationale"].is_string()) rationale = reply["rationale"];
  return {p, rationale, reply};
}

AgentResponse HttpAgent::respond(const AgentInput& input) const {
  const Scenario& s = input.scenario;
  json choices = json::array();
  for (const Choice& c : s.choices) choices.push_back({{"label", c.label}, {"text", c.text}});
  json body = {{"scenario", s.id}, {"mode", mode_name(input.mode)}, {"prompt", input.prompt}, {"choices", choices}};
  if (input.egocentric) body["egocentric"] = encode_faces(input.egocentric->view, face_size_);
  json imagined = json::array();
  for (const ImaginedView& v : input.imagined) {
    imagined.push_back({{"source", v.source},
                        {"pose", world::to_json(v.observation.pose)},
                        {"faces", encode_faces(v.observation.view, face_size_)}});
  }
  body["imagined"] = imagined;
  return parse_reply(s, net::post_json(url_, body));
}

std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed) {
  if (spec == "random") return std::make_unique<RandomAgent>(seed);
  if (spec == "omniscient") return std::make_unique<OmniscientAgent>();
  if (spec == "rule") return std::make_unique<RuleAgent>("oracle");
  if (spec == "rule-probabilistic") return std::make_unique<RuleAgent>("probabilistic");
  if (spec.rfind("http:", 0) == 0) return std::make_unique<HttpAgent>(spec.substr(5));
  throw Error(ErrorKind::Usage, "unknown agent " + spec);
}

}  // namespace panoworld::eqa
