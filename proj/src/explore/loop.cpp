#include "panoworld/explore/loop.hpp"

#include "panoworld/common/error.hpp"

#include <cmath>
#include <numeric>

namespace panoworld::explore {

Vec3 LoopPath::closure_residual() const {
  Pose p{Vec3::Zero(), 0.0};
  for (const ExplorationConfig& c : legs) p = advance(p, c);
  return p.position;
}

double LoopPath::net_heading() const {
  double total = 0.0;
  for (const ExplorationConfig& c : legs) total += c.heading_change;
  return total;
}

LoopPath loop_from_polygon(const std::vector<double>& directions, const std::vector<double>& lengths,
                           double meters_per_frame) {
  if (directions.size() != lengths.size() || directions.size() < 2) {
    throw Error(ErrorKind::Sampling, "a loop needs at least two legs");
  }
  LoopPath path;
  double heading = 0.0;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    const double turn = geo::wrap_pi(directions[i] - heading);
    ExplorationConfig c = ExplorationConfig::from_distance(turn, lengths[i], meters_per_frame);
    path.legs.push_back(c);
    heading = geo::wrap_pi(heading + turn);
    path.total_distance += lengths[i];
    if (turn != 0.0) ++path.rotation_count;
  }
  // Restore the starting orientation with a zero-distance turn.
  const double closing = geo::wrap_pi(-heading);
  ExplorationConfig last;
  last.heading_change = closing;
  path.legs.push_back(last);
  if (closing != 0.0) ++path.rotation_count;
  return path;
}

LoopPath sample_loop_path(std::mt19937_64& rng, const LoopBounds& b) {
  if (b.max_rotations < 2 || b.min_rotations < 2 || b.min_rotations > b.max_rotations) {
    throw Error(ErrorKind::Sampling, "loop rotation bounds must satisfy 2 <= min <= max");
  }
  if (!(b.max_distance > 0.0) || !(b.min_distance > 0.0) || b.min_distance > b.max_distance) {
    throw Error(ErrorKind::Sampling, "loop distance bounds must satisfy 0 < min <= max");
  }
  std::uniform_int_distribution<int> rotations(b.min_rotations, b.max_rotations);
  std::uniform_real_distribution<double> perimeter(b.min_distance, b.max_distance);
  std::uniform_real_distribution<double> angle(-geo::kPi, geo::kPi);
  std::uniform_real_distribution<double> unit(0.2, 1.0);

  for (int attempt = 0; attempt < b.max_attempts; ++attempt) {
    const int k = rotations(rng);
    const double target = perimeter(rng);
    std::vector<double> dirs, lens;
    if (k == 2) {
      // Out and back.
      dirs = {0.0, -geo::kPi};
      lens = {0.5 * target, 0.5 * target};
    } else {
      // k - 1 random legs; the last closes the polygon.
      double sx = 0.0, sz = 0.0;
      for (int i = 0; i < k - 1; ++i) {
        const double a = i == 0 ? 0.0 : angle(rng);
        const double l = unit(rng);
        dirs.push_back(a);
        lens.push_back(l);
        sx += l * std::cos(a);
        sz += l * std::sin(a);
      }
      dirs.push_back(std::atan2(-sz, -sx));
      lens.push_back(std::hypot(sx, sz));
      const double sum = std::accumulate(lens.begin(), lens.end(), 0.0);
      for (double& l : lens) l *= target / sum;
    }
    bool ok = true;
    double heading = 0.0;
    for (std::size_t i = 0; i < dirs.size() && ok; ++i) {
      if (lens[i] < b.min_leg) ok = false;
      const double turn = std::abs(geo::wrap_pi(dirs[i] - heading));
      if (i > 0 && turn < b.min_turn) ok = false;
      heading = dirs[i];
    }
    if (ok && std::abs(geo::wrap_pi(-heading)) < b.min_turn) ok = false;
    if (!ok) continue;
    LoopPath path = loop_from_polygon(dirs, lens, b.meters_per_frame);
    if (path.rotation_count != k) continue;
    return path;
  }
  throw Error(ErrorKind::Sampling, "no loop satisfied the bounds within the attempt limit");
}

bool loop_blocked(const world::Scene& scene, const Pose& start, const LoopPath& path, double clearance) {
  Pose p = start;
  for (const ExplorationConfig& c : path.legs) {
    const Pose next = advance(p, c);
    if (world::check_collision(scene, p, next, clearance)) return true;
    p = next;
  }
  return false;
}

LoopResult execute_loop(const SessionFactory& make_session, const LoopPath& path, const world::Scene* reference,
                        double clearance) {
  ExplorationSession session = make_session();
  LoopResult result;
  result.origin_view = session.origin_view();
  if (reference != nullptr && loop_blocked(*reference, session.imagined_pose(), path, clearance)) {
    result.status = LoopStatus::Filtered;
    result.final_pose = session.imagined_pose();
    return result;
  }
  for (const ExplorationConfig& c : path.legs) session.step(c);
  result.final_view = session.current_view();
  result.final_pose = session.imagined_pose();
  return result;
}

}  // namespace panoworld::explore
