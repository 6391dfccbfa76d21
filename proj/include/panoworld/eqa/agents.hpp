#pragma once

#include "panoworld/belief/perception.hpp"
#include "panoworld/eqa/scenario.hpp"
#include "panoworld/explore/session.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace panoworld::eqa {

/// What the agent is given: the question alone, plus its own panorama, plus
/// imagined views from a world model.
enum class Mode { Unimodal, Multimodal, Imagination };

std::string_view mode_name(Mode mode);
Mode mode_from_name(std::string_view name);  // throws ErrorKind::Usage

struct ImaginedView {
  std::string source;  // "self" for the agent's own imagined walk, else the other agent's name
  belief::Observation observation;
};

struct AgentInput {
  const Scenario& scenario;
  Mode mode;
  std::string prompt;
  std::optional<belief::Observation> egocentric;  // multimodal and imagination
  std::vector<ImaginedView> imagined;             // imagination only
  /// World model session at the agent's pose; imagination only.
  const explore::ExplorationSession* session = nullptr;
};

struct AgentResponse {
  std::vector<double> distribution;  // aligned with scenario.choices
  std::string rationale;
  nlohmann::json raw;  // what the agent actually returned, for transcripts
};

/// Implementations must be callable concurrently.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentResponse respond(const AgentInput& input) const = 0;
  virtual std::string name() const = 0;
  /// Remote agents are subject to the evaluation's concurrent-request cap.
  virtual bool external() const { return false; }
};

/// Flat Dirichlet(1, ..., 1) draw per scenario, seeded by (seed, scenario id).
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed = 0) : seed_(seed) {}
  AgentResponse respond(const AgentInput& input) const override;
  std::string name() const override { return "random"; }

 private:
  std::uint64_t seed_;
};

/// Reads the ground truth. Upper bound for the harness.
class OmniscientAgent : public Agent {
 public:
  AgentResponse respond(const AgentInput& input) const override;
  std::string name() const override { return "omniscient"; }
};

/// Bayesian agent. Starts from a uniform belief over the scenario's
/// hypotheses, updates it with whatever the mode provides and pushes the
/// pooled belief through the scenario's decision table. In imagination mode
/// a single-agent scenario walks its imagination path in the world model;
/// a multi-agent scenario infers each other agent's belief from an imagined
/// view at that agent's pose.
class RuleAgent : public Agent {
 public:
  /// perception: "oracle" (exact analysis by synthesis) or "probabilistic".
  explicit RuleAgent(std::string perception = "oracle");
  AgentResponse respond(const AgentInput& input) const override;
  std::string name() const override { return "rule"; }

 private:
  std::unique_ptr<belief::ObservationModel> model_for(const Scenario& s) const;
  std::string perception_;
};

/// External agent. POSTs {"scenario", "mode", "prompt", "choices",
/// "egocentric": {face: base64 PNG}, "imagined": [{"source", "pose", "faces"}]}
/// and accepts {"distribution": {label: p}, "rationale"} or
/// {"choice": label, "rationale"}. Replies it cannot map raise
/// ErrorKind::Policy with the raw body as detail.
class HttpAgent : public Agent {
 public:
  explicit HttpAgent(std::string url, int face_size = 128) : url_(std::move(url)), face_size_(face_size) {}
  AgentResponse respond(const AgentInput& input) const override;
  std::string name() const override { return "http"; }
  bool external() const override { return true; }
  static AgentResponse parse_reply(const Scenario& scenario, const nlohmann::json& reply);

 private:
  std::string url_;
  int face_size_;
};

/// "random" | "omniscient" | "rule" | "rule-probabilistic" | "http:<url>".
std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed = 0);

/// {face name: base64 PNG} of the cube faces of a panorama.
nlohmann::json encode_faces(const Panorama& view, int face_size);

}  // namespace panoworld::eqa
