#pragma once

#include "panoworld/belief/perception.hpp"
#include "panoworld/explore/session.hpp"

#include <vector>

namespace panoworld::belief {

/// b'(s) proportional to L(s) * b(s): the static-scene update, where the
/// transition model is the identity over hypotheses. Throws
/// ErrorKind::Contradiction when the observation has zero likelihood under
/// every hypothesis with prior mass.
Belief bayes_update(const Belief& prior, const std::vector<double>& likelihoods);

Belief physical_update(const Belief& prior, const Observation& observation, const ObservationModel& model);

struct ExplorationUpdate {
  Belief belief;
  std::vector<Belief> trace;              // belief after each step
  std::vector<Observation> observations;  // final frame of each step
};

/// Walks `configs` physically in the true world, observing the oracle render
/// at the end of each action.
ExplorationUpdate physical_exploration(const Belief& prior, const world::Scene& truth, const world::Pose& start,
                                       const std::vector<explore::ExplorationConfig>& configs,
                                       const ObservationModel& model, int width, int height);

/// Same walk in imagination: a fork of `session` generates each observation,
/// so the session (and the physical pose) is left untouched. Generator
/// errors propagate.
ExplorationUpdate imaginative_update(const Belief& prior, const explore::ExplorationSession& session,
                                     const std::vector<explore::ExplorationConfig>& configs,
                                     const ObservationModel& model);

/// Turn toward `to`, walk there, then turn to its heading. Empty when the
/// poses coincide.
std::vector<explore::ExplorationConfig> path_to_pose(const world::Pose& from, const world::Pose& to,
                                                     double meters_per_frame = explore::kMetersPerFrame);

struct OtherAgentInference {
  Observation imagined;  // predicted view of the other agent
  Belief belief;         // that agent's imagined belief
  std::vector<explore::ExplorationConfig> path;
};

/// Imagines travelling from the session's pose to `other_pose`, takes the
/// view there as the other agent's observation and updates `other_prior`
/// with it.
OtherAgentInference infer_other_agent(const Belief& other_prior, const explore::ExplorationSession& self,
                                      const world::Pose& other_pose, const ObservationModel& model);

}  // namespace panoworld::belief
