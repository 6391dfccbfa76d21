#pragma once

#include "panoworld/belief/hypothesis.hpp"

#include <string>
#include <vector>

namespace panoworld::belief {

struct ActionDistribution {
  std::vector<std::string> actions;
  std::vector<double> probabilities;

  std::size_t argmax() const;  // first maximum
  const std::string& best() const { return actions.at(argmax()); }
  double probability(const std::string& action) const;
  /// Throws ErrorKind::Policy unless sizes match, entries are in [0, 1] and
  /// they sum to 1 within 1e-9.
  void validate() const;
};

struct Goal {
  std::string text;
};

/// pi(a | {b_1..b_K}, g). Index 0 of the belief set is the deciding agent.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual ActionDistribution decide(const std::vector<Belief>& beliefs, const Goal& goal) const = 0;
  virtual std::string name() const = 0;
};

/// Normalized geometric mean of the beliefs (log-linear pool): zero
/// wherever any agent rules a hypothesis out, and K copies of one belief pool
/// back to that belief. Throws ErrorKind::Contradiction when the beliefs
/// share no support.
Belief aggregate_beliefs(const std::vector<Belief>& beliefs);

/// Each hypothesis has a correct action; the aggregated belief is pushed
/// through that table.
class DecisionTablePolicy : public Policy {
 public:
  DecisionTablePolicy(std::vector<std::string> actions, std::vector<int> action_of_hypothesis);
  ActionDistribution decide(const std::vector<Belief>& beliefs, const Goal& goal) const override;
  std::string name() const override { return "decision-table"; }

 private:
  std::vector<std::string> actions_;
  std::vector<int> table_;
};

/// Scripted yield rule: "yield" when the pooled belief puts more than
/// `threshold` on a hazard value of `slot`, else "proceed". An agent that
/// knows nothing leaves the pool unchanged, so one informed agent decides.
class YieldPolicy : public Policy {
 public:
  YieldPolicy(const HypothesisSpace& space, std::size_t slot, std::vector<int> hazard_values, double threshold = 0.5);
  ActionDistribution decide(const std::vector<Belief>& beliefs, const Goal& goal) const override;
  std::string name() const override { return "yield"; }

  double hazard_probability(const Belief& belief) const;

 private:
  const HypothesisSpace* space_;
  std::size_t slot_;
  std::vector<int> hazard_;
  double threshold_;
};

struct Decision {
  ActionDistribution distribution;
  std::string action;
};

/// a_1 = pi({b_1..b_K}, g). Checks K >= 1, normalized inputs and a valid
/// policy output.
Decision multi_agent_decide(const std::vector<Belief>& beliefs, const Goal& goal, const Policy& policy);

}  // namespace panoworld::belief
