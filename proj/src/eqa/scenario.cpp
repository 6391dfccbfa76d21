#include "panoworld/eqa/scenario.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace panoworld::eqa {

using nlohmann::json;

std::size_t Scenario::truth_index() const { return space->find(truth); }

world::Scene Scenario::true_scene() const { return space->realize(truth_index()); }

int Scenario::choice_index(const std::string& label) const {
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (choices[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

void Scenario::validate() const {
  const auto fail = [&](const std::string& why) { throw Error(ErrorKind::Domain, "scenario " + id + ": " + why); };
  if (!space) fail("no hypothesis space");
  if (category != "single-agent" && category != "multi-agent") fail("unknown category " + category);
  if (choices.size() < 2) fail("needs at least two choices");
  std::set<std::string> labels;
  for (const Choice& c : choices) {
    if (!labels.insert(c.label).second) fail("repeated choice label " + c.label);
  }
  if (!labels.count(gold_choice)) fail("gold choice " + gold_choice + " is not a choice");
  if (decision.size() != space->size()) fail("decision table does not cover the hypothesis space");
  for (const std::string& d : decision) {
    if (!labels.count(d)) fail("decision table names unknown choice " + d);
  }
  if (!rationale.empty() && rationale.size() != space->size()) fail("rationale table has the wrong size");
  if (decision[truth_index()] != gold_choice) fail("gold choice disagrees with the decision table");
  if (view_width < 2 || view_height < 1) fail("bad view size");
  if (category == "multi-agent" && others.empty()) fail("multi-agent scenario without other agents");
  for (const OtherAgent& o : others) {
    if (o.prior.empty()) continue;
    if (o.prior.size() != space->size()) fail("prior of " + o.name + " has the wrong size");
    belief::Belief::from_weights(o.prior);
  }
}

namespace {

json truth_json(const std::vector<std::pair<std::string, std::string>>& truth) {
  json t = json::object();
  for (const auto& [slot, value] : truth) t[slot] = value;
  return t;
}

}  // namespace

json to_json(const Scenario& s) {
  json choices = json::array();
  for (const Choice& c : s.choices) choices.push_back({{"label", c.label}, {"text", c.text}});
  json others = json::array();
  for (const OtherAgent& o : s.others) {
    json j = {{"name", o.name}, {"pose", world::to_json(o.pose)}};
    if (!o.prior.empty()) j["prior"] = o.prior;
    others.push_back(j);
  }
  json imagination = json::array();
  for (const auto& c : s.imagination) imagination.push_back(explore::to_json(c));
  json doc = {{"schema", kScenarioSchema},
              {"id", s.id},
              {"category", s.category},
              {"kind", s.kind},
              {"world", s.space->to_json()},
              {"truth", truth_json(s.truth)},
              {"self", world::to_json(s.self)},
              {"others", others},
              {"context", s.context},
              {"choices", choices},
              {"gold_choice", s.gold_choice},
              {"gold_rationale", s.gold_rationale},
              {"decision", s.decision},
              {"rationale", s.rationale},
              {"imagination", imagination},
              {"view", {{"width", s.view_width}, {"height", s.view_height}}}};
  if (s.control_pair) doc["control_pair"] = *s.control_pair;
  return doc;
}

Scenario scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  try {
    if (doc.value("schema", std::string()) != kScenarioSchema) {
      throw Error(ErrorKind::Protocol, "unsupported scenario schema");
    }
    Scenario s;
    s.id = doc.at("id").get<std::string>();
    s.category = doc.at("category").get<std::string>();
    s.kind = doc.value("kind", std::string());
    const json& world = doc.at("world");
    const json space_doc = world.is_string() ? json::parse(io::read_text(base_dir / world.get<std::string>())) : world;
    s.space = std::make_shared<const belief::HypothesisSpace>(belief::HypothesisSpace::from_json(space_doc));
    for (const auto& [slot, value] : doc.at("truth").items()) s.truth.emplace_back(slot, value.get<std::string>());
    s.self = world::pose_from_json(doc.at("self"));
    for (const json& o : doc.value("others", json::array())) {
      s.others.push_back({o.at("name").get<std::string>(), world::pose_from_json(o.at("pose")),
                          o.value("prior", std::vector<double>())});
    }
    s.context = doc.at("context").get<std::string>();
    for (const json& c : doc.at("choices")) s.choices.push_back({c.at("label"), c.at("text")});
    s.gold_choice = doc.at("gold_choice").get<std::string>();
    s.gold_rationale = doc.value("gold_rationale", std::string());
    s.decision = doc.at("decision").get<std::vector<std::string>>();
    s.rationale = doc.value("rationale", std::vector<std::string>());
    for (const json& c : doc.value("imagination", json::array())) s.imagination.push_back(explore::config_from_json(c));
    if (doc.contains("view")) {
      s.view_width = doc["view"].at("width").get<int>();
      s.view_height = doc["view"].at("height").get<int>();
    }
    if (doc.contains("control_pair")) s.control_pair = doc["control_pair"].get<std::string>();
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed scenario: ") + e.what());
  }
}

void validate_control_pairs(const std::vector<Scenario>& suite) {
  std::map<std::string, std::vector<const Scenario*>> pairs;
  for (const Scenario& s : suite) {
    if (s.control_pair) pairs[*s.control_pair].push_back(&s);
  }
  for (const auto& [pair, members] : pairs) {
    if (members.size() != 2) {
      throw Error(ErrorKind::Domain, "control pair " + pair + " has " + std::to_string(members.size()) + " members");
    }
    json a = to_json(*members[0]);
    json b = to_json(*members[1]);
    const json ta = a["truth"];
    const json tb = b["truth"];
    for (const char* f : kControlledFields) {
      a.erase(f);
      b.erase(f);
    }
    if (a != b) {
      throw Error(ErrorKind::Domain, "control pair " + pair + " differs outside the controlled variable",
                  json::diff(a, b).dump());
    }
    int differing = 0;
    for (const auto& [slot, value] : ta.items()) {
      if (!tb.contains(slot)) throw Error(ErrorKind::Domain, "control pair " + pair + " truths name different slots");
      if (tb[slot] != value) ++differing;
    }
    if (differing != 1 || ta.size() != tb.size()) {
      throw Error(ErrorKind::Domain, "control pair " + pair + " must differ in exactly one slot");
    }
  }
}

void write_suite(const std::filesystem::path& file, const std::vector<Scenario>& suite) {
  json list = json::array();
  for (const Scenario& s : suite) list.push_back(to_json(s));
  io::write_text(file, json{{"schema", "panoworld.eqa-suite/1"}, {"scenarios", list}}.dump(1) + "\n");
}

std::vector<Scenario> read_suite(const std::filesystem::path& file) {
  json doc;
  try {
    doc = json::parse(io::read_text(file));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, "suite file is not JSON: " + std::string(e.what()));
  }
  std::vector<Scenario> suite;
  if (doc.is_object() && doc.value("schema", std::string()) == kScenarioSchema) {
    suite.push_back(scenario_from_json(doc, file.parent_path()));
  } else {
    for (const json& s : doc.at("scenarios")) suite.push_back(scenario_from_json(s, file.parent_path()));
  }
  validate_control_pairs(suite);
  return suite;
}

}  // namespace panoworld::eqa
