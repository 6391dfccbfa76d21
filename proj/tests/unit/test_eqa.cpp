#include "panoworld/belief/policy.hpp"
#include "panoworld/belief/update.hpp"
#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"
#include "panoworld/eqa/evaluate.hpp"
#include "panoworld/eqa/suite.hpp"
#include "panoworld/world/render.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <thread>

namespace panoworld::eqa {
namespace {

using nlohmann::json;

const std::vector<Scenario>& full_suite() {
  static const std::vector<Scenario> suite = builtin_suite();
  return suite;
}

std::vector<Scenario> small_suite() {
  SuiteOptions o;
  o.single_pairs = 6;
  o.multi_pairs = 4;
  return builtin_suite(o);
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("panoworld_eqa_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

Record valid_record(const std::string& id, bool correct, double gold_p) {
  Record r;
  r.scenario = id;
  r.valid = true;
  r.correct = correct;
  r.gold_confidence = gold_p;
  return r;
}

TEST(Suite, ShapeAndTaxonomy) {
  const auto& suite = full_suite();
  ASSERT_EQ(suite.size(), 120u);
  std::map<std::string, int> kinds;
  int single = 0, multi = 0, occluded_single = 0;
  for (const Scenario& s : suite) {
    s.validate();
    ++kinds[s.kind];
    EXPECT_EQ(s.choices.size(), 4u);
    EXPECT_TRUE(s.control_pair.has_value());
    if (s.category == "single-agent") {
      ++single;
      if (s.kind != "open-road") ++occluded_single;
    } else {
      ++multi;
      EXPECT_FALSE(s.others.empty());
    }
  }
  EXPECT_EQ(single, 80);
  EXPECT_EQ(multi, 40);
  EXPECT_GE(occluded_single, 20);
  EXPECT_EQ(kinds.size(), 5u);
  EXPECT_NO_THROW(validate_control_pairs(suite));
}

TEST(Suite, DeterministicBySeed) {
  const auto a = small_suite();
  const auto b = small_suite();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json(a[i]), to_json(b[i]));
  SuiteOptions other;
  other.single_pairs = 6;
  other.multi_pairs = 4;
  other.seed = 8;
  EXPECT_NE(to_json(builtin_suite(other)[0]), to_json(a[0]));
}

// Renders directly rather than going through the suite's own check.
TEST(Suite, HazardHiddenFromSelfAndVisibleFromVantage) {
  for (const Scenario& s : small_suite()) {
    std::vector<Panorama> own;
    for (std::size_t h = 0; h < s.space->size(); ++h) {
      own.push_back(world::render_panorama(s.space->realize(h), s.self, s.view_width, s.view_height));
    }
    const bool hidden = std::all_of(own.begin(), own.end(), [&](const Panorama& p) { return p == own[0]; });
    EXPECT_EQ(hidden, s.kind != "open-road") << s.id;
    if (!hidden) continue;
    const world::Pose vantage = s.others.empty() ? explore::advance(s.self, s.imagination[0]) : s.others[0].pose;
    world::Pose end = s.self;
    for (const auto& c : s.imagination) end = explore::advance(end, c);
    const world::Pose& look = s.others.empty() ? end : vantage;
    const Panorama a = world::render_panorama(s.space->realize(0), look, s.view_width, s.view_height);
    for (std::size_t h = 1; h < s.space->size(); ++h) {
      EXPECT_NE(world::render_panorama(s.space->realize(h), look, s.view_width, s.view_height), a) << s.id;
    }
  }
}

TEST(Scenario, JsonAndSuiteFileRoundTrip) {
  const auto suite = small_suite();
  const auto dir = temp_dir("suite");
  write_suite(dir / "suite.json", suite);
  const auto back = read_suite(dir / "suite.json");
  ASSERT_EQ(back.size(), suite.size());
  for (std::size_t i = 0; i < suite.size(); ++i) EXPECT_EQ(to_json(back[i]).dump(), to_json(suite[i]).dump());
}

TEST(Scenario, WorldFileReference) {
  const Scenario s = small_suite().front();
  const auto dir = temp_dir("ref");
  io::write_text(dir / "world.json", s.space->to_json().dump());
  json doc = to_json(s);
  doc["world"] = "world.json";
  const Scenario back = scenario_from_json(doc, dir);
  EXPECT_EQ(to_json(back), to_json(s));
  EXPECT_THROW(scenario_from_json(doc, dir / "missing"), Error);
}

TEST(Scenario, ValidationRejectsBrokenInvariants) {
  Scenario s = small_suite().front();
  Scenario bad = s;
  bad.gold_choice = "Z";
  EXPECT_THROW(bad.validate(), Error);
  bad = s;
  bad.choices.resize(1);
  EXPECT_THROW(bad.validate(), Error);
  bad = s;
  bad.choices[1].label = bad.choices[0].label;
  EXPECT_THROW(bad.validate(), Error);
  bad = s;
  // A gold that disagrees with the decision table.
  for (const Choice& c : s.choices) {
    if (c.label != s.gold_choice) bad.gold_choice = c.label;
  }
  EXPECT_THROW(bad.validate(), Error);
  bad = s;
  bad.decision.pop_back();
  EXPECT_THROW(bad.validate(), Error);
  json doc = to_json(s);
  doc["schema"] = "panoworld.scenario/0";
  EXPECT_THROW(scenario_from_json(doc), Error);
}

TEST(Scenario, ControlPairDiscipline) {
  const auto suite = small_suite();
  auto broken = suite;
  broken[1].context += " It is raining.";
  EXPECT_THROW(validate_control_pairs(broken), Error);
  broken = suite;
  broken[1].truth = broken[0].truth;
  EXPECT_THROW(validate_control_pairs(broken), Error);
  broken = suite;
  broken.push_back(suite[0]);
  EXPECT_THROW(validate_control_pairs(broken), Error);
  broken = suite;
  broken.pop_back();
  EXPECT_THROW(validate_control_pairs(broken), Error);
}

TEST(Metrics, TrivialAndHandComputedValues) {
  std::vector<Record> all_right{valid_record("a", true, 1.0), valid_record("b", true, 1.0)};
  EXPECT_EQ(decision_accuracy(all_right), 1.0);
  EXPECT_EQ(gold_action_confidence(all_right), 1.0);
  std::vector<Record> uniform{valid_record("a", false, 0.25), valid_record("b", true, 0.25)};
  EXPECT_EQ(gold_action_confidence(uniform), 0.25);
  // (1 + 0 + 1) / 3 and (0.7 + 0.1 + 0.4) / 3; the invalid record is skipped by both.
  std::vector<Record> mixed{valid_record("a", true, 0.7), valid_record("b", false, 0.1),
                            valid_record("c", true, 0.4), Record{}};
  EXPECT_NEAR(decision_accuracy(mixed), 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(gold_action_confidence(mixed), 1.2 / 3.0, 1e-9);
  try {
    decision_accuracy({Record{}, Record{}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UndefinedReport);
  }
  EXPECT_THROW(gold_action_confidence({}), Error);
  EXPECT_NEAR(binomial_ci95(0.25, 120), 0.0774758, 1e-6);
}

TEST(Metrics, LogicAccuracyWithStubJudge) {
  const StubJudge judge;
  EXPECT_TRUE(judge.judge("", "The road is  clear, so proceed.", "the road is clear, so proceed"));
  EXPECT_FALSE(judge.judge("", "", "the road is clear"));
  std::vector<Record> rs{valid_record("a", true, 1.0), valid_record("b", true, 1.0)};
  rs[0].logic = true;
  rs[1].logic = true;
  EXPECT_EQ(logic_accuracy(rs), 1.0);
  rs[1].logic = false;
  EXPECT_EQ(logic_accuracy(rs), 0.5);
  EXPECT_THROW(logic_accuracy({valid_record("a", true, 1.0)}), Error);
}

// Returns a fixed answer, or misbehaves on purpose.
class FixedAgent : public Agent {
 public:
  enum class Behavior { Gold, Uniform, Unnormalized, WrongSize, Throws, EmptyRationale };
  explicit FixedAgent(Behavior b) : b_(b) {}
  AgentResponse respond(const AgentInput& in) const override {
    const Scenario& s = in.scenario;
    std::vector<double> p(s.choices.size(), 0.0);
    switch (b_) {
      case Behavior::Gold:
      case Behavior::EmptyRationale:
        p[static_cast<std::size_t>(s.choice_index(s.gold_choice))] = 1.0;
        return {p, b_ == Behavior::Gold ? s.gold_rationale : "", json::object()};
      case Behavior::Uniform: return {std::vector<double>(s.choices.size(), 0.25), "", json::object()};
      case Behavior::Unnormalized: return {std::vector<double>(s.choices.size(), 0.2), "", json::object()};
      case Behavior::WrongSize: return {{1.0}, "", json::object()};
      case Behavior::Throws: throw Error(ErrorKind::Policy, "no answer", "garbled");
    }
    return {};
  }
  std::string name() const override { return "fixed"; }

 private:
  Behavior b_;
};

TEST(Evaluate, LogicAccuracyEndToEnd) {
  const auto suite = small_suite();
  const StubJudge judge;
  EvalOptions o;
  o.mode = Mode::Unimodal;
  o.judge = &judge;
  EXPECT_EQ(evaluate(suite, FixedAgent(FixedAgent::Behavior::Gold), o).to_json()["metrics"]["logic_accuracy"], 1.0);
  EXPECT_EQ(evaluate(suite, FixedAgent(FixedAgent::Behavior::EmptyRationale), o).to_json()["metrics"]["logic_accuracy"],
            0.0);
  o.judge = nullptr;
  const json no_judge = evaluate(suite, FixedAgent(FixedAgent::Behavior::Gold), o).to_json();
  EXPECT_FALSE(no_judge["metrics"].contains("logic_accuracy"));
  EXPECT_EQ(no_judge["absent_metrics"], json::array({"logic_accuracy"}));
}

TEST(Evaluate, UniformAgentConfidenceIsQuarter) {
  EvalOptions o;
  o.mode = Mode::Unimodal;
  const EqaReport r = evaluate(small_suite(), FixedAgent(FixedAgent::Behavior::Uniform), o);
  EXPECT_NEAR(gold_action_confidence(r.records), 0.25, 1e-12);
}

TEST(Evaluate, InvalidResponsesAreFiltered) {
  const auto suite = small_suite();
  EvalOptions o;
  o.mode = Mode::Unimodal;
  for (auto b : {FixedAgent::Behavior::Unnormalized, FixedAgent::Behavior::WrongSize, FixedAgent::Behavior::Throws}) {
    const EqaReport r = evaluate(suite, FixedAgent(b), o);
    EXPECT_EQ(r.valid_count(), 0u);
    for (const Record& rec : r.records) EXPECT_FALSE(rec.error.empty());
    const json j = r.to_json();
    EXPECT_TRUE(j["metrics"]["decision_accuracy"].is_null());
    EXPECT_EQ(j["counts"]["invalid"], suite.size());
    EXPECT_THROW(decision_accuracy(r.records), Error);
  }
  const EqaReport thrown = evaluate(suite, FixedAgent(FixedAgent::Behavior::Throws), o);
  EXPECT_EQ(thrown.records[0].transcript["raw"], "garbled");
}

TEST(Evaluate, PromptCarriesContextChoicesAndViews) {
  const Scenario& s = full_suite().front();
  const std::string p = render_prompt(s, Mode::Multimodal, kDefaultPrompt);
  EXPECT_NE(p.find(s.context), std::string::npos);
  for (const Choice& c : s.choices) EXPECT_NE(p.find(c.label + ". " + c.text), std::string::npos);
  EXPECT_NE(p.find("cube faces"), std::string::npos);
  EXPECT_EQ(render_prompt(s, Mode::Unimodal, "{context}|{choices}").find("{"), std::string::npos);
}

TEST(Evaluate, RandomRunsAreByteReproducible) {
  const auto suite = small_suite();
  const StubJudge judge;
  const RandomAgent agent(1);
  EvalOptions o;
  o.mode = Mode::Multimodal;
  o.judge = &judge;
  const std::string a = evaluate(suite, agent, o).to_json().dump();
  EXPECT_EQ(evaluate(suite, agent, o).to_json().dump(), a);
  o.parallel = false;
  EXPECT_EQ(evaluate(suite, agent, o).to_json().dump(), a);
}

TEST(Evaluate, RecordsMergeByScenarioId) {
  auto suite = small_suite();
  std::reverse(suite.begin(), suite.end());
  EvalOptions o;
  o.mode = Mode::Unimodal;
  const EqaReport r = evaluate(suite, RandomAgent(3), o);
  for (std::size_t i = 1; i < r.records.size(); ++i) EXPECT_LT(r.records[i - 1].scenario, r.records[i].scenario);
}

TEST(Evaluate, ReportRecordsRoundTripAndTranscripts) {
  const auto suite = small_suite();
  const StubJudge judge;
  EvalOptions o;
  o.mode = Mode::Imagination;
  o.judge = &judge;
  const EqaReport r = evaluate(suite, RuleAgent(), o);
  const json doc = json::parse(r.to_json().dump());
  EXPECT_EQ(doc["schema"], kEqaSchema);
  const auto back = EqaReport::records_from_json(doc);
  EXPECT_EQ(decision_accuracy(back), decision_accuracy(r.records));
  EXPECT_EQ(gold_action_confidence(back), gold_action_confidence(r.records));
  EXPECT_EQ(logic_accuracy(back), logic_accuracy(r.records));

  const auto dir = temp_dir("transcripts");
  r.write_transcripts(dir / "t.jsonl");
  std::istringstream lines(io::read_text(dir / "t.jsonl"));
  std::string line;
  std::size_t n = 0;
  while (std::getline(lines, line)) {
    const json t = json::parse(line);
    EXPECT_TRUE(t.contains("prompt"));
    EXPECT_FALSE(t["imagined"].empty());
    ++n;
  }
  EXPECT_EQ(n, suite.size());
}

TEST(Baselines, RandomOmniscientAndModeOrdering) {
  const auto& suite = full_suite();
  EvalOptions o;
  o.mode = Mode::Multimodal;
  const double random = decision_accuracy(evaluate(suite, RandomAgent(1), o).records);
  EXPECT_NEAR(random, 0.25, binomial_ci95(0.25, suite.size()));
  EXPECT_EQ(decision_accuracy(evaluate(suite, OmniscientAgent(), o).records), 1.0);

  const RuleAgent rule;
  std::map<Mode, double> acc;
  for (Mode m : {Mode::Unimodal, Mode::Multimodal, Mode::Imagination}) {
    o.mode = m;
    const EqaReport r = evaluate(suite, rule, o);
    EXPECT_EQ(r.valid_count(), suite.size());
    acc[m] = decision_accuracy(r.records);
  }
  EXPECT_LE(acc[Mode::Unimodal], acc[Mode::Multimodal]);
  EXPECT_LT(acc[Mode::Multimodal], acc[Mode::Imagination]);
}

TEST(Baselines, ImaginationBeatsMultimodalOnOcclusion) {
  std::vector<Scenario> occlusion;
  for (const Scenario& s : full_suite()) {
    if (s.kind != "open-road") occlusion.push_back(s);
  }
  EvalOptions o;
  o.mode = Mode::Multimodal;
  const double multimodal = decision_accuracy(evaluate(occlusion, RuleAgent(), o).records);
  o.mode = Mode::Imagination;
  const double imagination = decision_accuracy(evaluate(occlusion, RuleAgent(), o).records);
  EXPECT_GT(imagination, multimodal);
  EXPECT_EQ(imagination, 1.0);
}

TEST(Baselines, NoisyWorldModelHurtsTheProbabilisticAgent) {
  const auto suite = small_suite();
  EvalOptions o;
  o.mode = Mode::Imagination;
  o.generator.kind = "noisy-oracle";
  o.generator.sigma = 0.3;
  const EqaReport noisy = evaluate(suite, RuleAgent("probabilistic"), o);
  o.generator = {};
  const EqaReport exact = evaluate(suite, RuleAgent("probabilistic"), o);
  EXPECT_EQ(noisy.valid_count(), suite.size());
  EXPECT_LE(gold_action_confidence(noisy.records), gold_action_confidence(exact.records));
}

TEST(MultiAgent, YieldPolicyPicksGoldOnEveryScenario) {
  for (const Scenario& s : full_suite()) {
    if (s.others.empty()) continue;
    const belief::OraclePerception model(s.space);
    const world::Scene truth = s.true_scene();
    const Panorama view = world::render_panorama(truth, s.self, s.view_width, s.view_height);
    const explore::ExplorationSession session(
        explore::make_generator({}, std::make_shared<const world::Scene>(truth)), view, s.self);
    const belief::Belief own = belief::physical_update(belief::Belief::uniform(s.space->size()), {view, s.self}, model);
    const auto other = belief::infer_other_agent(belief::Belief::uniform(s.space->size()), session, s.others[0].pose, model);
    const auto& values = s.space->slots()[0].values;
    std::vector<int> hazard;
    for (int v = 0; v < static_cast<int>(values.size()); ++v) {
      if (values[v].label == "toward" || values[v].label == "present") hazard.push_back(v);
    }
    const belief::YieldPolicy policy(*s.space, 0, hazard);
    const auto d = belief::multi_agent_decide({own, other.belief}, {s.context}, policy);
    const std::string& gold_text = s.choices[static_cast<std::size_t>(s.choice_index(s.gold_choice))].text;
    EXPECT_EQ(d.action == "yield", gold_text != kProceed) << s.id;
    // The agent alone cannot tell.
    EXPECT_EQ(belief::multi_agent_decide({own}, {s.context}, policy).action, "proceed");
  }
}

TEST(MultiAgent, OtherAgentPriorOverride) {
  auto suite = small_suite();
  auto it = std::find_if(suite.begin(), suite.end(), [](const Scenario& s) { return !s.others.empty(); });
  ASSERT_NE(it, suite.end());
  Scenario s = *it;
  EvalOptions o;
  o.mode = Mode::Imagination;
  std::vector<double> point(s.space->size(), 0.0);
  point[s.truth_index()] = 1.0;
  s.others[0].prior = point;
  EXPECT_TRUE(run_scenario(s, RuleAgent(), o).correct);
  // A prior that rules out the truth contradicts what the other agent sees.
  std::fill(point.begin(), point.end(), 1.0);
  point[s.truth_index()] = 0.0;
  s.others[0].prior = point;
  const Record r = run_scenario(s, RuleAgent(), o);
  EXPECT_FALSE(r.valid);
  EXPECT_NE(r.error.find("contradiction"), std::string::npos) << r.error;
}

class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string url(const std::string& path) const { return "http://127.0.0.1:" + std::to_string(port_) + path; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(External, HttpAgentAndJudge) {
  LocalServer srv;
  std::atomic<int> with_faces{0}, in_flight{0}, peak{0};
  srv.server().Post("/agent", [&](const httplib::Request& req, httplib::Response& res) {
    const int now = ++in_flight;
    for (int p = peak.load(); now > p && !peak.compare_exchange_weak(p, now);) {
    }
    const json body = json::parse(req.body);
    if (body.contains("egocentric") && body["egocentric"].size() == 6) ++with_faces;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight;
    // Always picks the first label.
    res.set_content(json{{"choice", body["choices"][0]["label"]}, {"rationale", "first"}}.dump(), "application/json");
  });
  srv.server().Post("/judge", [](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    const bool ok = body["prompt"].get<std::string>().find("{agent}") == std::string::npos;
    res.set_content(json{{"verdict", ok ? "correct" : "incorrect"}}.dump(), "application/json");
  });
  const auto suite = small_suite();
  const HttpAgent agent(srv.url("/agent"), 32);
  const HttpJudge judge(srv.url("/judge"));
  EvalOptions o;
  o.mode = Mode::Multimodal;
  o.judge = &judge;
  o.max_concurrent_requests = 2;
  const EqaReport r = evaluate(suite, agent, o);
  EXPECT_EQ(r.valid_count(), suite.size());
  EXPECT_EQ(with_faces.load(), static_cast<int>(suite.size()));
  EXPECT_LE(peak.load(), 2);
  EXPECT_EQ(r.to_json()["metrics"]["logic_accuracy"], 1.0);
  for (const Record& rec : r.records) EXPECT_EQ(rec.choice, "A");
}

TEST(External, JudgeTransportFailureMarksMetricAbsent) {
  const HttpJudge judge("http://127.0.0.1:9/judge");
  EvalOptions o;
  o.mode = Mode::Unimodal;
  o.judge = &judge;
  const json j = evaluate(small_suite(), OmniscientAgent(), o).to_json();
  EXPECT_FALSE(j["metrics"].contains("logic_accuracy"));
  EXPECT_EQ(j["absent_metrics"], json::array({"logic_accuracy"}));
  EXPECT_NE(j["absent_causes"]["logic_accuracy"].get<std::string>().find("transport"), std::string::npos);
  EXPECT_EQ(j["metrics"]["decision_accuracy"], 1.0);
}

TEST(External, ReplyParsing) {
  const Scenario& s = full_suite().front();
  const AgentResponse d = HttpAgent::parse_reply(s, {{"distribution", {{"A", 0.5}, {"C", 0.5}}}, {"rationale", "r"}});
  EXPECT_EQ(d.distribution, (std::vector<double>{0.5, 0.0, 0.5, 0.0}));
  EXPECT_EQ(d.rationale, "r");
  EXPECT_EQ(HttpAgent::parse_reply(s, {{"choice", "D"}}).distribution, (std::vector<double>{0, 0, 0, 1}));
  for (const json& bad : {json{{"choice", "Q"}}, json{{"distribution", {{"A", "high"}}}}, json::array(), json{{"x", 1}}}) {
    try {
      HttpAgent::parse_reply(s, bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Policy);
      EXPECT_EQ(e.detail(), bad.dump());
    }
  }
  EXPECT_THROW(make_agent("oracle-of-delphi"), Error);
  EXPECT_EQ(make_agent("http:http://x/y")->name(), "http");
}

}  // namespace
}  // namespace panoworld::eqa
