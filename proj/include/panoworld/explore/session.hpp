#pragma once

#include "panoworld/explore/config.hpp"
#include "panoworld/explore/generator.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace panoworld::explore {

enum class HistoryRetention {
  All,        // keep every generated frame
  LastFrame,  // keep only the final frame of each step
};

struct SessionOptions {
  HistoryRetention retention = HistoryRetention::All;
  /// Ask the generator for the final frame only. Implies LastFrame retention;
  /// step() then returns a single frame. Used by loop evaluation, where only
  /// the last frame of each leg is ever read.
  bool final_only = false;
  std::uint64_t seed = 0;  // per-step generator seeds derive from it
};

struct HistoryEntry {
  ExplorationConfig config;
  Pose pose_before;
  Pose pose_after;
  std::vector<Panorama> frames;  // all frames, or only the last one
};

/// Imaginative exploration state: a generator, the current view and the
/// dead-reckoned imagined pose. Copying a session forks it.
class ExplorationSession {
 public:
  ExplorationSession(std::shared_ptr<WorldGenerator> generator, Panorama origin_view, Pose origin_pose,
                     SessionOptions options = {});

  /// Orientation update (view rotated by -heading_change, since a right
  /// turn moves scene content toward smaller longitude), then forward
  /// generation. Returns the generated frames. On failure the session is
  /// unchanged and the error names the step index.
  std::vector<Panorama> step(const ExplorationConfig& config);

  const Panorama& current_view() const { return current_view_; }
  const Panorama& origin_view() const { return origin_view_; }
  const Pose& imagined_pose() const { return pose_; }
  const Pose& origin_pose() const { return origin_pose_; }
  /// Sum of applied heading changes (not wrapped).
  double net_heading() const { return net_heading_; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  int step_count() const { return static_cast<int>(history_.size()); }
  const SessionOptions& options() const { return options_; }
  const std::shared_ptr<WorldGenerator>& generator() const { return generator_; }

  /// Independent child starting from this session's current state.
  ExplorationSession fork() const { return *this; }

  /// Seed handed to the generator for step `index`.
  std::uint64_t step_seed(int index) const;

  /// Rebuilds a session from persisted state (see the session store).
  static ExplorationSession restore(std::shared_ptr<WorldGenerator> generator, Panorama origin_view, Pose origin_pose,
                                    SessionOptions options, Panorama current_view, Pose pose, double net_heading,
                                    std::vector<HistoryEntry> history);

 private:
  std::shared_ptr<WorldGenerator> generator_;
  SessionOptions options_;
  Panorama origin_view_;
  Pose origin_pose_;
  Panorama current_view_;
  Pose pose_;
  double net_heading_ = 0.0;
  std::vector<HistoryEntry> history_;
};

struct Branch {
  double heading = 0.0;
  std::vector<Panorama> frames;
  std::optional<Pose> final_pose;
  std::optional<std::string> error;  // set when this branch failed
};

/// Explores each heading from the session's current state in a fork; the
/// session itself is not modified. Branch order follows `headings`.
std::vector<Branch> run_goal_agnostic(const ExplorationSession& session, const std::vector<double>& headings,
                                      double distance, int frame_count);

}  // namespace panoworld::explore
