#pragma once

#include "panoworld/eqa/agents.hpp"
#include "panoworld/eqa/judge.hpp"
#include "panoworld/explore/generator.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace panoworld::eqa {

inline constexpr const char* kDefaultPrompt =
    "{context}\n"
    "{views}\n"
    "Question: what should you do next?\n"
    "{choices}\n"
    "Consider what you and the other road users can see. Answer with JSON "
    "{\"distribution\": {label: probability}, \"rationale\": \"...\"}.";

struct EvalOptions {
  Mode mode = Mode::Multimodal;
  const Judge* judge = nullptr;  // logic accuracy is absent without one
  /// World model used for imagined views. Oracle kinds are bound to the
  /// scenario's true world.
  explore::GeneratorSpec generator;
  std::string prompt_template = kDefaultPrompt;
  bool parallel = true;
  /// Cap on simultaneous calls to external agents and judges.
  int max_concurrent_requests = 4;
  /// Called with (finished, total) after each scenario, possibly concurrently.
  std::function<void(int, int)> progress;
};

struct Record {
  std::string scenario;
  std::string category;
  std::string kind;
  bool valid = false;
  std::string error;  // why the response was filtered
  std::vector<double> distribution;
  std::string choice;
  bool correct = false;
  double gold_confidence = 0.0;
  std::string rationale;
  std::optional<bool> logic;  // judge verdict
  std::string judge_error;    // set when the judge could not be reached
  nlohmann::json transcript;
};

/// Fraction of valid records whose argmax choice is gold. Throws
/// ErrorKind::UndefinedReport when no record is valid.
double decision_accuracy(const std::vector<Record>& records);
/// Mean probability assigned to the gold choice over valid records.
double gold_action_confidence(const std::vector<Record>& records);
/// Fraction of judged valid records the judge accepted.
double logic_accuracy(const std::vector<Record>& records);

/// 1.96 * sqrt(p (1 - p) / n).
double binomial_ci95(double p, std::size_t n);

struct Breakdown {
  std::size_t valid = 0;
  double decision_accuracy = 0.0;
  double gold_confidence = 0.0;
};

inline constexpr const char* kEqaSchema = "panoworld.eqa/1";

struct EqaReport {
  std::string agent;
  Mode mode = Mode::Multimodal;
  nlohmann::json generator;
  std::optional<std::string> judge;
  std::vector<Record> records;

  std::size_t valid_count() const;
  std::map<std::string, Breakdown> by(const std::string& field) const;  // "category" | "kind"
  /// Metrics, counts and per-category/kind breakdowns. Undefined metrics are
  /// reported as null with a reason; logic accuracy is absent without a judge.
  nlohmann::json to_json() const;
  /// Inverse of the "records" array of to_json (transcripts are not kept).
  /// Lets externally produced records, e.g. human decisions, be aggregated.
  static std::vector<Record> records_from_json(const nlohmann::json& doc);
  /// One JSON object per line: prompt, inputs summary, raw reply, verdicts.
  void write_transcripts(const std::filesystem::path& file) const;
};

/// Renders the prompt for a scenario under the template.
std::string render_prompt(const Scenario& s, Mode mode, const std::string& prompt_template);

/// Runs one scenario. Agent errors and malformed distributions produce an
/// invalid record; they never abort the run.
Record run_scenario(const Scenario& s, const Agent& agent, const EvalOptions& options);

/// Runs the suite in parallel; records are ordered by scenario id.
EqaReport evaluate(const std::vector<Scenario>& suite, const Agent& agent, const EvalOptions& options);

}  // namespace panoworld::eqa
