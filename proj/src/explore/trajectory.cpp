#include "panoworld/explore/trajectory.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"

#include <cstdio>

namespace panoworld::explore {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool on_byte_grid(const Image& img) {
  for (const Rgb& p : img.pixels()) {
    if (p.r != quantize8(p.r) || p.g != quantize8(p.g) || p.b != quantize8(p.b)) return false;
  }
  return true;
}

Image read_frame(const fs::path& file) {
  return file.extension() == ".pfm" ? io::read_pfm(file) : io::read_png(file);
}

}  // namespace

std::string digest_hex(const Image& image) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest(image)));
  return buf;
}

json SessionRecipe::to_json() const {
  return {{"scene", world::to_json(*scene)},
          {"generator", generator.to_json()},
          {"origin_pose", world::to_json(origin_pose)},
          {"width", width},
          {"height", height},
          {"session",
           {{"seed", options.seed},
            {"final_only", options.final_only},
            {"retention", options.retention == HistoryRetention::All ? "all" : "last-frame"}}}};
}

SessionRecipe SessionRecipe::from_json(const json& doc) {
  try {
    SessionRecipe r;
    r.scene = std::make_shared<const world::Scene>(world::scene_from_json(doc.at("scene")));
    r.generator = GeneratorSpec::from_json(doc.value("generator", json::object()));
    r.origin_pose = doc.contains("origin_pose") ? world::pose_from_json(doc.at("origin_pose"))
                                                : world::eye_pose(*r.scene, 0.0, 0.0, 0.0);
    r.width = doc.value("width", 512);
    r.height = doc.value("height", 256);
    if (doc.contains("session")) {
      const json& s = doc.at("session");
      r.options.seed = s.value("seed", std::uint64_t{0});
      r.options.final_only = s.value("final_only", false);
      r.options.retention = s.value("retention", std::string("all")) == "all" ? HistoryRetention::All
                                                                              : HistoryRetention::LastFrame;
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed session recipe: ") + e.what());
  }
}

ExplorationSession SessionRecipe::build() const {
  if (!scene) throw Error(ErrorKind::Domain, "session recipe has no scene");
  world::RenderOptions ro;
  ro.supersample = generator.supersample;
  Panorama origin = world::render_panorama(*scene, origin_pose, width, height, ro);
  return ExplorationSession(make_generator(generator, scene), std::move(origin), origin_pose, options);
}

TrajectoryLog::TrajectoryLog(const fs::path& file, const SessionRecipe& recipe, const ExplorationSession& session,
                             bool write_frames)
    : file_(file), write_frames_(write_frames) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  frames_dir_ = file.parent_path() / (file.stem().string() + "_frames");
  out_.open(file, std::ios::trunc);
  if (!out_) throw Error(ErrorKind::Io, "cannot open trajectory log " + file.string());
  json header = {{"type", "header"},
                 {"schema", kTrajectorySchema},
                 {"recipe", recipe.to_json()},
                 {"origin_digest", digest_hex(session.origin_view())},
                 {"generator_name", session.generator()->name()}};
  out_ << header.dump() << "\n";
  out_.flush();
}

void TrajectoryLog::append(const ExplorationSession& session, const std::vector<Panorama>& frames, const json& extra) {
  const int index = session.step_count() - 1;
  if (index < 0) throw Error(ErrorKind::Domain, "trajectory append before any step");
  append(index, session.history().back(), frames, extra);
}

void TrajectoryLog::append(int index, const HistoryEntry& entry, const std::vector<Panorama>& frames, const json& extra) {
  json digests = json::array();
  json files = json::array();
  // Frame numbers count from the end so final-only sessions still name the last frame consistently.
  const int n = entry.config.frame_count;
  const int first = n - static_cast<int>(frames.size()) + 1;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    digests.push_back(digest_hex(frames[i]));
    if (!write_frames_) continue;
    char name[64];
    const bool png = on_byte_grid(frames[i]);
    std::snprintf(name, sizeof(name), "step_%04d_frame_%03d.%s", index, first + static_cast<int>(i), png ? "png" : "pfm");
    const fs::path target = frames_dir_ / name;
    if (png) {
      io::write_png(target, frames[i]);
    } else {
      io::write_pfm(target, frames[i]);
    }
    files.push_back((fs::path(frames_dir_.filename()) / name).generic_string());
  }
  json rec = {{"type", "step"},
              {"index", index},
              {"config", to_json(entry.config)},
              {"pose", world::to_json(entry.pose_after)},
              {"digests", std::move(digests)},
              {"frames", std::move(files)}};
  if (!extra.is_null()) rec["extra"] = extra;
  out_ << rec.dump() << "\n";
  out_.flush();
  if (!out_) throw Error(ErrorKind::Io, "trajectory write failed: " + file_.string());
}

SessionRecipe read_trajectory(const fs::path& file, std::vector<TrajectoryRecord>& records) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Io, "cannot open trajectory log " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Protocol, "empty trajectory log");
  const json header = json::parse(line, nullptr, false);
  if (header.is_discarded() || header.value("schema", std::string()) != kTrajectorySchema) {
    throw Error(ErrorKind::Protocol, "not a trajectory log: " + file.string());
  }
  SessionRecipe recipe = SessionRecipe::from_json(header.at("recipe"));
  records.clear();
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) throw Error(ErrorKind::Protocol, "trajectory line " + std::to_string(lineno) + " is not JSON");
    if (rec.value("type", std::string()) != "step") continue;
    TrajectoryRecord r;
    r.config = config_from_json(rec.at("config"));
    r.pose = world::pose_from_json(rec.at("pose"));
    r.digests = rec.value("digests", std::vector<std::string>{});
    r.frame_files = rec.value("frames", std::vector<std::string>{});
    records.push_back(std::move(r));
  }
  return recipe;
}

ReplayReport replay_trajectory(const fs::path& file) {
  std::vector<TrajectoryRecord> records;
  const SessionRecipe recipe = read_trajectory(file, records);
  ReplayReport report;
  ExplorationSession session = recipe.build();
  {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    const json header = json::parse(line);
    if (header.value("origin_digest", std::string()) != digest_hex(session.origin_view())) {
      report.problems.push_back("origin view differs");
    }
  }
  for (const TrajectoryRecord& r : records) {
    const std::vector<Panorama> frames = session.step(r.config);
    ++report.steps;
    if (frames.size() != r.digests.size()) {
      report.problems.push_back("step " + std::to_string(report.steps - 1) + ": frame count differs");
      continue;
    }
    for (std::size_t i = 0; i < frames.size(); ++i) {
      ++report.frames_checked;
      if (digest_hex(frames[i]) != r.digests[i]) ++report.mismatches;
      if (i < r.frame_files.size()) {
        const Image stored = read_frame(file.parent_path() / r.frame_files[i]);
        if (!(stored == frames[i])) ++report.mismatches;
      }
    }
    const Pose& p = session.imagined_pose();
    if (p.position != r.pose.position || p.yaw != r.pose.yaw) {
      report.problems.push_back("step " + std::to_string(report.steps - 1) + ": pose differs");
    }
  }
  report.final_view = session.current_view();
  report.final_pose = session.imagined_pose();
  return report;
}

}  // namespace panoworld::explore
