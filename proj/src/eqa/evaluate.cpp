#include "panoworld/eqa/evaluate.hpp"

#include "panoworld/belief/update.hpp"
#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"
#include "panoworld/world/render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <semaphore>
#include <sstream>

namespace panoworld::eqa {

using nlohmann::json;

namespace {

void require_valid(const std::vector<Record>& records, const char* metric) {
  for (const Record& r : records) {
    if (r.valid) return;
  }
  throw Error(ErrorKind::UndefinedReport, std::string(metric) + " is undefined without valid records");
}

// Holds a slot of the request cap while an external call runs.
class RequestGate {
 public:
  RequestGate(std::counting_semaphore<>* sem, bool external) : sem_(external ? sem : nullptr) {
    if (sem_) sem_->acquire();
  }
  ~RequestGate() {
    if (sem_) sem_->release();
  }
  RequestGate(const RequestGate&) = delete;
  RequestGate& operator=(const RequestGate&) = delete;

 private:
  std::counting_semaphore<>* sem_;
};

Record run_scenario_gated(const Scenario& s, const Agent& agent, const EvalOptions& options,
                          std::counting_semaphore<>* gate);

// Empty when the distribution is acceptable.
std::string check_distribution(const std::vector<double>& p, std::size_t n) {
  if (p.size() != n) return "distribution has " + std::to_string(p.size()) + " entries for " + std::to_string(n) + " choices";
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) return "probability outside [0, 1]";
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-6) return "probabilities sum to " + std::to_string(total);
  return {};
}

}  // namespace

double decision_accuracy(const std::vector<Record>& records) {
  require_valid(records, "decision accuracy");
  std::size_t n = 0, hit = 0;
  for (const Record& r : records) {
    if (!r.valid) continue;
    ++n;
    hit += r.correct ? 1 : 0;
  }
  return static_cast<double>(hit) / static_cast<double>(n);
}

double gold_action_confidence(const std::vector<Record>& records) {
  require_valid(records, "gold-action confidence");
  std::size_t n = 0;
  double sum = 0.0;
  for (const Record& r : records) {
    if (!r.valid) continue;
    ++n;
    sum += r.gold_confidence;
  }
  return sum / static_cast<double>(n);
}

double logic_accuracy(const std::vector<Record>& records) {
  std::size_t n = 0, pass = 0;
  for (const Record& r : records) {
    if (!r.valid || !r.logic) continue;
    ++n;
    pass += *r.logic ? 1 : 0;
  }
  if (n == 0) throw Error(ErrorKind::UndefinedReport, "logic accuracy is undefined without judged records");
  return static_cast<double>(pass) / static_cast<double>(n);
}

double binomial_ci95(double p, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::UndefinedReport, "confidence interval over zero records");
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

std::string render_prompt(const Scenario& s, Mode mode, const std::string& prompt_template) {
  std::ostringstream choices;
  for (const Choice& c : s.choices) choices << c.label << ". " << c.text << "\n";
  std::string views;
  switch (mode) {
    case Mode::Unimodal: views = "No images are provided."; break;
    case Mode::Multimodal: views = "Attached: the six cube faces of your current panoramic view."; break;
    case Mode::Imagination:
      views = "Attached: the six cube faces of your current panoramic view, and imagined views generated by a "
              "world model";
      views += s.others.empty() ? " along a short walk to a better vantage point." : " from the other road users' positions.";
      break;
  }
  std::string out = fill_template(prompt_template, "context", s.context);
  out = fill_template(out, "views", views);
  return fill_template(out, "choices", choices.str());
}

Record run_scenario(const Scenario& s, const Agent& agent, const EvalOptions& options) {
  return run_scenario_gated(s, agent, options, nullptr);
}

namespace {

Record run_scenario_gated(const Scenario& s, const Agent& agent, const EvalOptions& options,
                          std::counting_semaphore<>* gate) {
  Record r;
  r.scenario = s.id;
  r.category = s.category;
  r.kind = s.kind;
  const std::string prompt = render_prompt(s, options.mode, options.prompt_template);
  r.transcript = {{"scenario", s.id}, {"mode", mode_name(options.mode)}, {"prompt", prompt}};

  AgentInput input{s, options.mode, prompt, std::nullopt, {}, nullptr};
  std::optional<explore::ExplorationSession> session;
  try {
    if (options.mode != Mode::Unimodal) {
      const world::Scene truth = s.true_scene();
      world::RenderOptions ro;
      ro.supersample = options.generator.supersample;
      ro.exec = Exec::Serial;
      const Panorama view = world::render_panorama(truth, s.self, s.view_width, s.view_height, ro);
      input.egocentric = belief::Observation{view, s.self};
      if (options.mode == Mode::Imagination) {
        auto scene = std::make_shared<const world::Scene>(truth);
        session.emplace(explore::make_generator(options.generator, scene), view, s.self);
        input.session = &*session;
        // Views for agents that cannot drive the session themselves.
        if (s.others.empty()) {
          explore::ExplorationSession walk = session->fork();
          for (const auto& c : s.imagination) walk.step(c);
          input.imagined.push_back({"self", {walk.current_view(), walk.imagined_pose()}});
        } else {
          for (const OtherAgent& o : s.others) {
            explore::ExplorationSession walk = session->fork();
            for (const auto& c : belief::path_to_pose(s.self, o.pose)) walk.step(c);
            input.imagined.push_back({o.name, {walk.current_view(), walk.imagined_pose()}});
          }
        }
        json sources = json::array();
        for (const ImaginedView& v : input.imagined) {
          sources.push_back({{"source", v.source}, {"pose", world::to_json(v.observation.pose)}});
        }
        r.transcript["imagined"] = sources;
      }
    }
  } catch (const Error& e) {
    r.error = std::string("harness: ") + e.what();
    r.transcript["error"] = r.error;
    return r;
  }

  AgentResponse response;
  try {
    const RequestGate held(gate, agent.external());
    response = agent.respond(input);
  } catch (const Error& e) {
    r.error = std::string(to_string(e.kind())) + ": " + e.what();
    r.transcript["error"] = r.error;
    if (!e.detail().empty()) r.transcript["raw"] = e.detail();
    return r;
  }
  r.transcript["raw"] = response.raw;
  r.distribution = response.distribution;
  r.rationale = response.rationale;
  r.transcript["rationale"] = response.rationale;
  if (const std::string why = check_distribution(response.distribution, s.choices.size()); !why.empty()) {
    r.error = "invalid response: " + why;
    r.transcript["error"] = r.error;
    return r;
  }
  r.valid = true;
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.distribution.size(); ++i) {
    if (r.distribution[i] > r.distribution[best]) best = i;
  }
  r.choice = s.choices[best].label;
  r.correct = r.choice == s.gold_choice;
  r.gold_confidence = r.distribution[static_cast<std::size_t>(s.choice_index(s.gold_choice))];
  r.transcript["choice"] = r.choice;
  r.transcript["correct"] = r.correct;
  if (options.judge) {
    try {
      const RequestGate held(gate, options.judge->external());
      r.logic = options.judge->judge(s.context, r.rationale, s.gold_rationale);
      r.transcript["logic"] = *r.logic;
    } catch (const Error& e) {
      r.judge_error = std::string(to_string(e.kind())) + ": " + e.what();
      r.transcript["judge_error"] = r.judge_error;
    }
  }
  return r;
}

}  // namespace

EqaReport evaluate(const std::vector<Scenario>& suite, const Agent& agent, const EvalOptions& options) {
  EqaReport report;
  report.agent = agent.name();
  report.mode = options.mode;
  report.generator = options.generator.to_json();
  if (options.judge) report.judge = options.judge->name();
  if (options.max_concurrent_requests < 1) throw Error(ErrorKind::Usage, "max_concurrent_requests must be >= 1");
  std::counting_semaphore<> gate(options.max_concurrent_requests);
  report.records.resize(suite.size());
  const long n = static_cast<long>(suite.size());
  std::atomic<int> finished{0};
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (long i = 0; i < n; ++i) {
    report.records[static_cast<std::size_t>(i)] =
        run_scenario_gated(suite[static_cast<std::size_t>(i)], agent, options, &gate);
    if (options.progress) options.progress(++finished, static_cast<int>(n));
  }
  std::stable_sort(report.records.begin(), report.records.end(),
                   [](const Record& a, const Record& b) { return a.scenario < b.scenario; });
  return report;
}

std::size_t EqaReport::valid_count() const {
  std::size_t n = 0;
  for (const Record& r : records) n += r.valid ? 1 : 0;
  return n;
}

std::map<std::string, Breakdown> EqaReport::by(const std::string& field) const {
  std::map<std::string, std::vector<Record>> groups;
  for (const Record& r : records) {
    if (field == "category") {
      groups[r.category].push_back(r);
    } else if (field == "kind") {
      groups[r.kind].push_back(r);
    } else {
      throw Error(ErrorKind::Usage, "cannot group by " + field);
    }
  }
  std::map<std::string, Breakdown> out;
  for (const auto& [key, rs] : groups) {
    Breakdown b;
    for (const Record& r : rs) b.valid += r.valid ? 1 : 0;
    if (b.valid > 0) {
      b.decision_accuracy = decision_accuracy(rs);
      b.gold_confidence = gold_action_confidence(rs);
    }
    out[key] = b;
  }
  return out;
}

json EqaReport::to_json() const {
  json metrics = json::object();
  const std::size_t valid = valid_count();
  if (valid > 0) {
    const double acc = decision_accuracy(records);
    metrics["decision_accuracy"] = acc;
    metrics["decision_accuracy_ci95"] = binomial_ci95(acc, valid);
    metrics["gold_action_confidence"] = gold_action_confidence(records);
  } else {
    metrics["decision_accuracy"] = nullptr;
    metrics["gold_action_confidence"] = nullptr;
    metrics["undefined_reason"] = "no valid records";
  }
  json absent = json::array();
  json absent_causes = json::object();
  if (!judge) {
    absent.push_back("logic_accuracy");
    absent_causes["logic_accuracy"] = "no judge configured";
  } else {
    const auto failed = std::find_if(records.begin(), records.end(),
                                     [](const Record& r) { return !r.judge_error.empty(); });
    if (failed != records.end()) {
      absent.push_back("logic_accuracy");
      absent_causes["logic_accuracy"] = "judge failed on " + failed->scenario + ": " + failed->judge_error;
    } else {
      try {
        metrics["logic_accuracy"] = logic_accuracy(records);
      } catch (const Error& e) {
        absent.push_back("logic_accuracy");
        absent_causes["logic_accuracy"] = e.what();
      }
    }
  }
  json records_json = json::array();
  for (const Record& r : records) {
    json j = {{"scenario", r.scenario}, {"category", r.category}, {"kind", r.kind}, {"valid", r.valid}};
    if (r.valid) {
      j["choice"] = r.choice;
      j["correct"] = r.correct;
      j["gold_confidence"] = r.gold_confidence;
      j["distribution"] = r.distribution;
      if (r.logic) j["logic"] = *r.logic;
      j["rationale"] = r.rationale;
    } else {
      j["error"] = r.error;
    }
    records_json.push_back(j);
  }
  const auto breakdown = [&](const std::string& field) {
    json out = json::object();
    for (const auto& [key, b] : by(field)) {
      out[key] = {{"valid", b.valid}, {"decision_accuracy", b.valid ? json(b.decision_accuracy) : json(nullptr)},
                  {"gold_action_confidence", b.valid ? json(b.gold_confidence) : json(nullptr)}};
    }
    return out;
  };
  return {{"schema", kEqaSchema},
          {"agent", agent},
          {"mode", mode_name(mode)},
          {"generator", generator},
          {"judge", judge ? json(*judge) : json(nullptr)},
          {"confidence_source", "distribution"},
          {"confidence_note", "gold-action confidence is the probability the agent's reported distribution gives the gold "
                              "choice, not a normalized model logit"},
          {"counts", {{"total", records.size()}, {"valid", valid}, {"invalid", records.size() - valid}}},
          {"metrics", metrics},
          {"absent_metrics", absent},
          {"absent_causes", absent_causes},
          {"by_category", breakdown("category")},
          {"by_kind", breakdown("kind")},
          {"records", records_json}};
}

std::vector<Record> EqaReport::records_from_json(const json& doc) {
  const json& list = doc.is_array() ? doc : doc.at("records");
  std::vector<Record> out;
  try {
    for (const json& j : list) {
      Record r;
      r.scenario = j.at("scenario").get<std::string>();
      r.category = j.value("category", std::string());
      r.kind = j.value("kind", std::string());
      r.valid = j.at("valid").get<bool>();
      if (r.valid) {
        r.choice = j.at("choice").get<std::string>();
        r.correct = j.at("correct").get<bool>();
        r.gold_confidence = j.at("gold_confidence").get<double>();
        r.distribution = j.value("distribution", std::vector<double>());
        r.rationale = j.value("rationale", std::string());
        if (j.contains("logic")) r.logic = j["logic"].get<bool>();
      } else {
        r.error = j.value("error", std::string());
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed record: ") + e.what());
  }
  return out;
}

void EqaReport::write_transcripts(const std::filesystem::path& file) const {
  std::string out;
  for (const Record& r : records) out += r.transcript.dump() + "\n";
  io::write_text(file, out);
}

}  // namespace panoworld::eqa
