#include "panoworld/explore/session.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/rng.hpp"
#include "panoworld/geometry/rotation.hpp"

#include <mutex>
#include <string>

namespace panoworld::explore {

namespace {

std::mutex& exclusive_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

ExplorationSession::ExplorationSession(std::shared_ptr<WorldGenerator> generator, Panorama origin_view,
                                       Pose origin_pose, SessionOptions options)
    : generator_(std::move(generator)),
      options_(options),
      origin_view_(std::move(origin_view)),
      origin_pose_(origin_pose),
      current_view_(origin_view_),
      pose_(origin_pose) {
  if (!generator_) throw Error(ErrorKind::Domain, "session needs a generator");
  if (origin_view_.empty()) throw Error(ErrorKind::Domain, "session needs an origin view");
  origin_pose_.validate();
  if (options_.final_only) options_.retention = HistoryRetention::LastFrame;
}

std::uint64_t ExplorationSession::step_seed(int index) const {
  return derive_seed(options_.seed, static_cast<std::uint64_t>(index));
}

std::vector<Panorama> ExplorationSession::step(const ExplorationConfig& config) {
  config.validate();
  const int index = step_count();
  const geo::RotationSpec turn{-config.heading_change, 0.0, geo::RotationMode::YawOnly};
  const Panorama oriented = geo::rotate_panorama(current_view_, turn);
  const Pose turned = orient(pose_, config);
  GenerationRequest request{oriented, turned, config, index, step_seed(index), options_.final_only};

  std::vector<Panorama> frames;
  try {
    if (generator_->exclusive()) {
      std::lock_guard lock(exclusive_mutex());
      frames = generator_->generate(request);
    } else {
      frames = generator_->generate(request);
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "step " + std::to_string(index) + ": " + e.what(), e.detail());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Generator, "step " + std::to_string(index) + ": " + e.what());
  }

  const std::size_t expected = options_.final_only ? 1u : static_cast<std::size_t>(config.frame_count);
  if (frames.size() != expected) {
    throw Error(ErrorKind::Generator, "step " + std::to_string(index) + ": generator returned " +
                                          std::to_string(frames.size()) + " frames, expected " + std::to_string(expected));
  }
  for (const Panorama& f : frames) {
    if (f.width() != current_view_.width() || f.height() != current_view_.height() || !f.channels_valid()) {
      throw Error(ErrorKind::Generator, "step " + std::to_string(index) + ": generator frame violates panorama invariants");
    }
  }

  HistoryEntry entry;
  entry.config = config;
  entry.pose_before = pose_;
  entry.pose_after = advance(pose_, config);
  if (options_.retention == HistoryRetention::All) {
    entry.frames = frames;
  } else {
    entry.frames.push_back(frames.back());
  }
  current_view_ = frames.back();
  pose_ = entry.pose_after;
  net_heading_ += config.heading_change;
  history_.push_back(std::move(entry));
  return frames;
}

ExplorationSession ExplorationSession::restore(std::shared_ptr<WorldGenerator> generator, Panorama origin_view,
                                               Pose origin_pose, SessionOptions options, Panorama current_view,
                                               Pose pose, double net_heading, std::vector<HistoryEntry> history) {
  ExplorationSession s(std::move(generator), std::move(origin_view), origin_pose, options);
  s.current_view_ = std::move(current_view);
  s.pose_ = pose;
  s.net_heading_ = net_heading;
  s.history_ = std::move(history);
  return s;
}

std::vector<Branch> run_goal_agnostic(const ExplorationSession& session, const std::vector<double>& headings,
                                      double distance, int frame_count) {
  std::vector<Branch> out;
  out.reserve(headings.size());
  for (double h : headings) {
    Branch b;
    b.heading = h;
    try {
      ExplorationSession child = session.fork();
      ExplorationConfig c{h, distance, frame_count, 0.0};
      b.frames = child.step(c);
      b.final_pose = child.imagined_pose();
    } catch (const Error& e) {
      b.error = e.what();
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace panoworld::explore
