#include "panoworld/service/session_store.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"

#include <cstdio>

namespace panoworld::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& file) {
  try {
    return json::parse(io::read_text(file));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, "corrupt store file " + file.string() + ": " + e.what());
  }
}

// Ids become path components.
void check_id(const std::string& id) {
  if (id.empty() || id.size() > 128) throw NotFound("bad id");
  for (char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') throw NotFound("bad id " + id);
  }
}

}  // namespace

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "sessions");
  fs::create_directories(root_ / "scenes");
  fs::create_directories(root_ / "tokens");
}

fs::path SessionStore::session_dir(const std::string& id) const {
  check_id(id);
  return root_ / "sessions" / id;
}

std::string SessionStore::frame_name(int step, int frame) {
  char name[64];
  std::snprintf(name, sizeof(name), "frames/step_%04d_frame_%03d.pfm", step, frame);
  return name;
}

std::string SessionStore::create(const explore::SessionRecipe& recipe, const explore::ExplorationSession& session,
                                 std::optional<std::string> parent, int parent_step) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    do {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "s-%06d", next_id_++);
      id = buf;
    } while (fs::exists(root_ / "sessions" / id));
    fs::create_directories(root_ / "sessions" / id / "frames");
  }
  auto stored = std::make_shared<StoredSession>(StoredSession{id, recipe, session, std::move(parent), parent_step});
  io::write_text(session_dir(id) / "recipe.json", recipe.to_json().dump(1) + "\n");
  io::write_pfm(session_dir(id) / "origin.pfm", session.origin_view());
  save(*stored);
  std::lock_guard lock(mutex_);
  cache_[id] = stored;
  return id;
}

void SessionStore::save(const StoredSession& stored) {
  const fs::path dir = session_dir(stored.id);
  const explore::ExplorationSession& s = stored.session;
  json history = json::array();
  for (int k = 0; k < s.step_count(); ++k) {
    const explore::HistoryEntry& e = s.history()[static_cast<std::size_t>(k)];
    const int n = e.config.frame_count;
    const int first = n - static_cast<int>(e.frames.size()) + 1;
    json files = json::array();
    for (std::size_t f = 0; f < e.frames.size(); ++f) {
      const std::string name = frame_name(k, first + static_cast<int>(f));
      if (!fs::exists(dir / name)) io::write_pfm(dir / name, e.frames[f]);
      files.push_back(name);
    }
    history.push_back({{"config", explore::to_json(e.config)},
                       {"pose_before", world::to_json(e.pose_before)},
                       {"pose_after", world::to_json(e.pose_after)},
                       {"frames", files}});
  }
  io::write_pfm(dir / "current.pfm.tmp", s.current_view());
  fs::rename(dir / "current.pfm.tmp", dir / "current.pfm");
  json state = {{"schema", kSessionSchema},
                {"id", stored.id},
                {"pose", world::to_json(s.imagined_pose())},
                {"net_heading", s.net_heading()},
                {"history", history},
                {"parent", stored.parent ? json(*stored.parent) : json(nullptr)},
                {"parent_step", stored.parent_step}};
  io::write_text(dir / "state.json.tmp", state.dump(1) + "\n");
  fs::rename(dir / "state.json.tmp", dir / "state.json");
}

StoredSession SessionStore::load(const std::string& id) const {
  const fs::path dir = session_dir(id);
  if (!fs::exists(dir / "state.json")) throw NotFound("no session " + id);
  const explore::SessionRecipe recipe = explore::SessionRecipe::from_json(read_json(dir / "recipe.json"));
  const json state = read_json(dir / "state.json");
  if (state.value("schema", std::string()) != kSessionSchema) throw Error(ErrorKind::Protocol, "unknown session schema");
  std::vector<explore::HistoryEntry> history;
  for (const json& h : state.at("history")) {
    explore::HistoryEntry e;
    e.config = explore::config_from_json(h.at("config"));
    e.pose_before = world::pose_from_json(h.at("pose_before"));
    e.pose_after = world::pose_from_json(h.at("pose_after"));
    for (const json& f : h.at("frames")) e.frames.push_back(io::read_pfm(dir / f.get<std::string>()));
    history.push_back(std::move(e));
  }
  auto generator = explore::make_generator(recipe.generator, recipe.scene);
  explore::ExplorationSession session = explore::ExplorationSession::restore(
      generator, io::read_pfm(dir / "origin.pfm"), recipe.origin_pose, recipe.options, io::read_pfm(dir / "current.pfm"),
      world::pose_from_json(state.at("pose")), state.at("net_heading").get<double>(), std::move(history));
  std::optional<std::string> parent;
  if (state.contains("parent") && state["parent"].is_string()) parent = state["parent"].get<std::string>();
  return StoredSession{id, recipe, std::move(session), parent, state.value("parent_step", 0)};
}

std::shared_ptr<StoredSession> SessionStore::get(const std::string& id) {
  check_id(id);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  }
  auto loaded = std::make_shared<StoredSession>(load(id));
  std::lock_guard lock(mutex_);
  return cache_.try_emplace(id, loaded).first->second;
}

bool SessionStore::exists(const std::string& id) const {
  try {
    return fs::exists(session_dir(id) / "state.json");
  } catch (const NotFound&) {
    return false;
  }
}

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "sessions")) {
    if (fs::exists(entry.path() / "state.json")) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void SessionStore::evict_all() {
  std::lock_guard lock(mutex_);
  cache_.clear();
}

std::shared_ptr<std::mutex> SessionStore::writer_lock(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

std::string SessionStore::put_scene(const world::Scene& scene) {
  const std::string text = world::serialize(scene);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char id[32];
  std::snprintf(id, sizeof(id), "scene-%016llx", static_cast<unsigned long long>(h));
  const fs::path file = root_ / "scenes" / (std::string(id) + ".json");
  std::lock_guard lock(mutex_);
  if (!fs::exists(file)) io::write_text(file, text);
  return id;
}

world::Scene SessionStore::get_scene(const std::string& id) const {
  check_id(id);
  const fs::path file = root_ / "scenes" / (id + ".json");
  if (!fs::exists(file)) throw NotFound("no scene " + id);
  return world::scene_from_json(read_json(file));
}

std::optional<json> SessionStore::token(const std::string& scope, const std::string& token) const {
  check_id(scope);
  std::lock_guard lock(mutex_);
  const fs::path file = root_ / "tokens" / (scope + ".json");
  if (!fs::exists(file)) return std::nullopt;
  const json all = read_json(file);
  if (!all.contains(token)) return std::nullopt;
  return all[token];
}

void SessionStore::put_token(const std::string& scope, const std::string& token, const json& reply) {
  check_id(scope);
  std::lock_guard lock(mutex_);
  const fs::path file = root_ / "tokens" / (scope + ".json");
  json all = fs::exists(file) ? read_json(file) : json::object();
  all[token] = reply;
  io::write_text(file.string() + ".tmp", all.dump());
  fs::rename(file.string() + ".tmp", file);
}

void SessionStore::export_trajectory(const std::string& id, const fs::path& file, bool write_frames) {
  const auto stored = get(id);
  const explore::ExplorationSession& s = stored->session;
  explore::TrajectoryLog log(file, stored->recipe, s, write_frames);
  for (int k = 0; k < s.step_count(); ++k) {
    const auto& e = s.history()[static_cast<std::size_t>(k)];
    log.append(k, e, e.frames);
  }
}

}  // namespace panoworld::service
