#include "panoworld/belief/update.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/world/render.hpp"

#include <cmath>

namespace panoworld::belief {

Belief bayes_update(const Belief& prior, const std::vector<double>& likelihoods) {
  if (likelihoods.size() != prior.size()) {
    throw Error(ErrorKind::DimensionMismatch, "likelihood vector does not match the belief");
  }
  std::vector<double> w(prior.size());
  double total = 0.0;
  for (std::size_t h = 0; h < w.size(); ++h) {
    const double l = likelihoods[h];
    if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorKind::Domain, "likelihood outside [0, 1]");
    w[h] = l * prior[h];
    total += w[h];
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::Contradiction, "observation is impossible under every hypothesis with prior mass");
  }
  for (double& x : w) x /= total;
  return Belief::from_normalized(std::move(w));
}

Belief physical_update(const Belief& prior, const Observation& observation, const ObservationModel& model) {
  if (model.space().size() != prior.size()) {
    throw Error(ErrorKind::DimensionMismatch, "belief does not match the model's hypothesis space");
  }
  return bayes_update(prior, model.likelihoods(observation));
}

ExplorationUpdate physical_exploration(const Belief& prior, const world::Scene& truth, const world::Pose& start,
                                       const std::vector<explore::ExplorationConfig>& configs,
                                       const ObservationModel& model, int width, int height) {
  ExplorationUpdate out{prior, {}, {}};
  world::Pose pose = start;
  for (const explore::ExplorationConfig& c : configs) {
    c.validate();
    pose = explore::advance(pose, c);
    Observation o{world::render_panorama(truth, pose, width, height), pose};
    out.belief = physical_update(out.belief, o, model);
    out.trace.push_back(out.belief);
    out.observations.push_back(std::move(o));
  }
  return out;
}

ExplorationUpdate imaginative_update(const Belief& prior, const explore::ExplorationSession& session,
                                     const std::vector<explore::ExplorationConfig>& configs,
                                     const ObservationModel& model) {
  ExplorationUpdate out{prior, {}, {}};
  explore::ExplorationSession imagined = session.fork();
  for (const explore::ExplorationConfig& c : configs) {
    imagined.step(c);
    Observation o{imagined.current_view(), imagined.imagined_pose()};
    out.belief = physical_update(out.belief, o, model);
    out.trace.push_back(out.belief);
    out.observations.push_back(std::move(o));
  }
  return out;
}

std::vector<explore::ExplorationConfig> path_to_pose(const world::Pose& from, const world::Pose& to,
                                                     double meters_per_frame) {
  std::vector<explore::ExplorationConfig> path;
  const double dx = to.position.x() - from.position.x();
  const double dz = to.position.z() - from.position.z();
  const double dy = to.position.y() - from.position.y();
  const double d = std::hypot(dx, dz);
  double heading = from.yaw;
  if (d > 1e-12 || std::abs(dy) > 1e-12) {
    const double travel = d > 1e-12 ? std::atan2(dz, dx) : heading;
    explore::ExplorationConfig c = explore::ExplorationConfig::from_distance(geo::wrap_pi(travel - heading), d,
                                                                             meters_per_frame);
    c.climb = dy;
    path.push_back(c);
    heading = geo::wrap_pi(heading + c.heading_change);
  }
  const double final_turn = geo::wrap_pi(to.yaw - heading);
  if (final_turn != 0.0) {
    explore::ExplorationConfig c;
    c.heading_change = final_turn;
    path.push_back(c);
  }
  return path;
}

OtherAgentInference infer_other_agent(const Belief& other_prior, const explore::ExplorationSession& self,
                                      const world::Pose& other_pose, const ObservationModel& model) {
  OtherAgentInference out{{self.current_view(), self.imagined_pose()}, other_prior, {}};
  out.path = path_to_pose(self.imagined_pose(), other_pose);
  if (!out.path.empty()) {
    explore::ExplorationSession imagined = self.fork();
    for (const explore::ExplorationConfig& c : out.path) imagined.step(c);
    out.imagined = {imagined.current_view(), imagined.imagined_pose()};
  }
  out.belief = physical_update(other_prior, out.imagined, model);
  return out;
}

}  // namespace panoworld::belief
