#pragma once

#include "panoworld/belief/hypothesis.hpp"
#include "panoworld/explore/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace panoworld::eqa {

struct Choice {
  std::string label;  // "A".."D"
  std::string text;
};

struct OtherAgent {
  std::string name;  // "taxi"
  world::Pose pose;
  std::vector<double> prior;  // over the scenario's hypotheses; empty = uniform
};

/// One embodied question. The world is a hypothesis space (base scene plus
/// uncertain slots) and `truth` picks the real hypothesis. `decision` names
/// the correct choice under every hypothesis; gold_choice is decision[truth].
struct Scenario {
  std::string id;
  std::string category;  // "single-agent" | "multi-agent"
  std::string kind;      // taxonomy entry, e.g. "blocked-ambulance"
  std::shared_ptr<const belief::HypothesisSpace> space;
  std::vector<std::pair<std::string, std::string>> truth;  // slot -> value label
  world::Pose self;
  std::vector<OtherAgent> others;
  std::string context;
  std::vector<Choice> choices;
  std::string gold_choice;
  std::string gold_rationale;
  std::vector<std::string> decision;  // choice label per hypothesis
  std::vector<std::string> rationale;  // reference reasoning per hypothesis
  std::vector<explore::ExplorationConfig> imagination;  // scripted imagined walk
  std::optional<std::string> control_pair;
  int view_width = 128;  // panorama size the scenario was verified at
  int view_height = 64;

  std::size_t truth_index() const;
  world::Scene true_scene() const;
  int choice_index(const std::string& label) const;  // -1 when unknown

  /// Throws ErrorKind::Domain on: fewer than 2 choices, repeated labels,
  /// unknown gold, a decision table of the wrong size or naming unknown
  /// labels, or gold_choice != decision[truth].
  void validate() const;
};

inline constexpr const char* kScenarioSchema = "panoworld.scenario/1";

nlohmann::json to_json(const Scenario& s);
/// "world" is either an inline hypothesis space or a path to a file holding
/// one, resolved against `base_dir`.
Scenario scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Fields a scenario may differ in from its control: the truth (in exactly
/// one slot) and what follows from it.
inline constexpr const char* kControlledFields[] = {"id", "truth", "gold_choice", "gold_rationale"};

/// Checks pairing structurally: every control_pair id names exactly two
/// scenarios whose documents agree outside kControlledFields and whose
/// truths differ in exactly one slot. Throws ErrorKind::Domain.
void validate_control_pairs(const std::vector<Scenario>& suite);

/// Suite files: {"schema": "panoworld.eqa-suite/1", "scenarios": [...]}.
void write_suite(const std::filesystem::path& file, const std::vector<Scenario>& suite);
std::vector<Scenario> read_suite(const std::filesystem::path& file);

}  // namespace panoworld::eqa
