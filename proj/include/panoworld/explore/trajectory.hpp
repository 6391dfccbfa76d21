#pragma once

#include "panoworld/explore/generator.hpp"
#include "panoworld/explore/session.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace panoworld::explore {

/// Everything needed to rebuild a session from scratch: the scene, the
/// generator, the origin pose, the view size and the session options. The
/// origin view is the oracle render of the scene at the origin pose.
struct SessionRecipe {
  std::shared_ptr<const world::Scene> scene;
  GeneratorSpec generator;
  Pose origin_pose;
  int width = 512;
  int height = 256;
  SessionOptions options;

  nlohmann::json to_json() const;
  static SessionRecipe from_json(const nlohmann::json& doc);
  ExplorationSession build() const;
};

inline constexpr const char* kTrajectorySchema = "panoworld.trajectory/1";

/// Line-delimited log. The first record is a header holding the recipe and
/// the origin view digest; each later record is one step with its config,
/// resulting pose, per-frame digests and frame file references (relative to
/// the log's directory).
class TrajectoryLog {
 public:
  TrajectoryLog(const std::filesystem::path& file, const SessionRecipe& recipe, const ExplorationSession& session,
                bool write_frames = true);

  void append(const ExplorationSession& session, const std::vector<Panorama>& frames,
              const nlohmann::json& extra = nullptr);
  /// Same, for history entry `index` of a session; used to export a log
  /// from stored history.
  void append(int index, const HistoryEntry& entry, const std::vector<Panorama>& frames,
              const nlohmann::json& extra = nullptr);

  const std::filesystem::path& path() const { return file_; }

 private:
  std::filesystem::path file_;
  std::filesystem::path frames_dir_;
  bool write_frames_;
  std::ofstream out_;
};

std::string digest_hex(const Image& image);

struct ReplayReport {
  int steps = 0;
  int frames_checked = 0;
  int mismatches = 0;
  std::vector<std::string> problems;
  Panorama final_view;
  Pose final_pose;

  bool identical() const { return mismatches == 0 && problems.empty(); }
};

/// Re-executes a log against a freshly built session and compares every
/// frame digest, every frame file and every pose bit for bit.
ReplayReport replay_trajectory(const std::filesystem::path& file);

/// Parsed log contents.
struct TrajectoryRecord {
  ExplorationConfig config;
  Pose pose;
  std::vector<std::string> digests;
  std::vector<std::string> frame_files;
};

SessionRecipe read_trajectory(const std::filesystem::path& file, std::vector<TrajectoryRecord>& records);

}  // namespace panoworld::explore
