#pragma once

#include "panoworld/world/scene.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace panoworld::belief {

/// One possible content of a slot; `primitives` are added to the base scene
/// when the value holds (empty for "absent").
struct SlotValue {
  std::string label;
  std::vector<world::Primitive> primitives;
};

/// An uncertain part of the world, e.g. "ambulance" in {absent, toward, away}.
struct Slot {
  std::string name;
  std::vector<SlotValue> values;
};

/// Cartesian product of slot values. Hypothesis i assigns slot j the value
/// (i / stride_j) % |values_j|, so hypotheses are mutually exclusive and
/// exhaustive by construction.
class HypothesisSpace {
 public:
  HypothesisSpace(world::Scene base, std::vector<Slot> slots);

  std::size_t size() const { return size_; }
  const std::vector<Slot>& slots() const { return slots_; }
  const world::Scene& base() const { return base_; }

  int value_of(std::size_t hypothesis, std::size_t slot) const;
  std::size_t index_of(const std::vector<int>& assignment) const;
  /// Index of the hypothesis with the given labels ("slot" -> "value").
  std::size_t find(const std::vector<std::pair<std::string, std::string>>& labels) const;
  /// "ambulance=toward,pedestrian=absent"
  std::string id(std::size_t hypothesis) const;
  /// Base scene plus the primitives of every assigned value.
  world::Scene realize(std::size_t hypothesis) const;

  nlohmann::json to_json() const;
  static HypothesisSpace from_json(const nlohmann::json& doc);

 private:
  world::Scene base_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

inline constexpr double kNormalizationTolerance = 1e-9;

/// Distribution over a hypothesis space. Values are immutable; updates
/// return new beliefs.
class Belief {
 public:
  static Belief uniform(std::size_t n);
  static Belief point(std::size_t n, std::size_t index);
  /// Normalizes; throws Domain on negative or non-finite weights or zero mass.
  static Belief from_weights(std::vector<double> weights);
  /// Keeps the weights as given; they must already sum to 1 within tolerance.
  static Belief from_normalized(std::vector<double> weights);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }
  double entropy() const;  // nats
  std::size_t argmax() const;
  /// Probability that `slot` takes value `value`.
  double marginal(const HypothesisSpace& space, std::size_t slot, int value) const;

  bool operator==(const Belief&) const = default;

 private:
  std::vector<double> w_;
};

inline constexpr const char* kBeliefSchema = "panoworld.belief/1";

/// {"schema", "hypotheses": [{"id", "weight"}...]} with weights printed
/// round-trip exact.
nlohmann::json dump(const HypothesisSpace& space, const Belief& belief);
Belief belief_from_dump(const HypothesisSpace& space, const nlohmann::json& doc);

}  // namespace panoworld::belief
