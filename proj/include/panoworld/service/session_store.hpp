#pragma once

#include "panoworld/explore/trajectory.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace panoworld::service {

/// Lookup of an id the store does not know.
class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StoredSession {
  std::string id;
  explore::SessionRecipe recipe;
  explore::ExplorationSession session;
  std::optional<std::string> parent;  // set for forks
  int parent_step = 0;                // parent's step count at the fork
};

inline constexpr const char* kSessionSchema = "panoworld.session/1";

/// On-disk layout under `root`:
///   scenes/<scene id>.json
///   sessions/<id>/recipe.json, state.json, origin.pfm, current.pfm,
///                 frames/step_SSSS_frame_FFF.pfm
///   tokens/<scope>.json       request-token replies
/// Views are stored as float maps, so reload is bit-exact for any generator.
/// Loaded sessions are cached; every mutation is written through.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  std::string create(const explore::SessionRecipe& recipe, const explore::ExplorationSession& session,
                     std::optional<std::string> parent = std::nullopt, int parent_step = 0);
  /// Persists the current state of a session created by this store.
  void save(const StoredSession& stored);
  /// Cached copy, or the persisted state rebuilt from disk. Throws NotFound.
  std::shared_ptr<StoredSession> get(const std::string& id);
  /// Always reads from disk, bypassing the cache.
  StoredSession load(const std::string& id) const;
  bool exists(const std::string& id) const;
  std::vector<std::string> list() const;
  /// Drops cached sessions; the next get() reloads from disk.
  void evict_all();

  std::filesystem::path session_dir(const std::string& id) const;
  /// Relative file name of frame `frame` (1-based) of step `step`.
  static std::string frame_name(int step, int frame);

  /// Per-session single-writer lock.
  std::shared_ptr<std::mutex> writer_lock(const std::string& id);

  /// Content-addressed scenes: the id is derived from the canonical text.
  std::string put_scene(const world::Scene& scene);
  world::Scene get_scene(const std::string& id) const;

  /// Recorded reply for a request token in `scope` (a session id or "global").
  std::optional<nlohmann::json> token(const std::string& scope, const std::string& token) const;
  void put_token(const std::string& scope, const std::string& token, const nlohmann::json& reply);

  /// Writes a trajectory log of the stored session's history.
  void export_trajectory(const std::string& id, const std::filesystem::path& file, bool write_frames = true);

 private:
  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<StoredSession>> cache_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  int next_id_ = 1;
};

}  // namespace panoworld::service
