#include "panoworld/belief/policy.hpp"

#include "panoworld/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace panoworld::belief {

std::size_t ActionDistribution::argmax() const {
  if (probabilities.empty()) throw Error(ErrorKind::Policy, "empty action distribution");
  return static_cast<std::size_t>(std::max_element(probabilities.begin(), probabilities.end()) -
                                  probabilities.begin());
}

double ActionDistribution::probability(const std::string& action) const {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] == action) return probabilities[i];
  }
  return 0.0;
}

void ActionDistribution::validate() const {
  if (actions.empty() || actions.size() != probabilities.size()) {
    throw Error(ErrorKind::Policy, "action distribution is empty or mis-sized");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Policy, "action probability outside [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::Policy, "action probabilities do not sum to 1");
}

Belief aggregate_beliefs(const std::vector<Belief>& beliefs) {
  if (beliefs.empty()) throw Error(ErrorKind::Policy, "no beliefs to aggregate");
  if (beliefs.size() == 1) return beliefs.front();
  const double inv_k = 1.0 / static_cast<double>(beliefs.size());
  std::vector<double> w(beliefs.front().size(), 1.0);
  for (const Belief& b : beliefs) {
    if (b.size() != w.size()) throw Error(ErrorKind::DimensionMismatch, "beliefs over different spaces");
    for (std::size_t h = 0; h < w.size(); ++h) w[h] *= std::pow(b[h], inv_k);
  }
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) throw Error(ErrorKind::Contradiction, "agent beliefs share no support");
  return Belief::from_weights(std::move(w));
}

DecisionTablePolicy::DecisionTablePolicy(std::vector<std::string> actions, std::vector<int> table)
    : actions_(std::move(actions)), table_(std::move(table)) {
  for (int a : table_) {
    if (a < 0 || static_cast<std::size_t>(a) >= actions_.size()) {
      throw Error(ErrorKind::Domain, "decision table names an unknown action");
    }
  }
}

ActionDistribution DecisionTablePolicy::decide(const std::vector<Belief>& beliefs, const Goal&) const {
  const Belief b = aggregate_beliefs(beliefs);
  if (b.size() != table_.size()) throw Error(ErrorKind::DimensionMismatch, "decision table does not match belief");
  ActionDistribution out{actions_, std::vector<double>(actions_.size(), 0.0)};
  for (std::size_t h = 0; h < b.size(); ++h) out.probabilities[static_cast<std::size_t>(table_[h])] += b[h];
  return out;
}

YieldPolicy::YieldPolicy(const HypothesisSpace& space, std::size_t slot, std::vector<int> hazard_values,
                         double threshold)
    : space_(&space), slot_(slot), hazard_(std::move(hazard_values)), threshold_(threshold) {
  if (slot >= space.slots().size()) throw Error(ErrorKind::Domain, "yield policy slot out of range");
}

double YieldPolicy::hazard_probability(const Belief& belief) const {
  double p = 0.0;
  for (int v : hazard_) p += belief.marginal(*space_, slot_, v);
  return p;
}

ActionDistribution YieldPolicy::decide(const std::vector<Belief>& beliefs, const Goal&) const {
  const bool yield = hazard_probability(aggregate_beliefs(beliefs)) > threshold_;
  return {{"proceed", "yield"}, {yield ? 0.0 : 1.0, yield ? 1.0 : 0.0}};
}

Decision multi_agent_decide(const std::vector<Belief>& beliefs, const Goal& goal, const Policy& policy) {
  if (beliefs.empty()) throw Error(ErrorKind::Policy, "multi-agent decision needs at least one belief");
  for (const Belief& b : beliefs) {
    double total = 0.0;
    for (double w : b.weights()) total += w;
    if (std::abs(total - 1.0) > kNormalizationTolerance) throw Error(ErrorKind::Domain, "belief is not normalized");
  }
  Decision d{policy.decide(beliefs, goal), {}};
  d.distribution.validate();
  d.action = d.distribution.best();
  return d;
}

}  // namespace panoworld::belief
