#include "panoworld/service/cli.hpp"

#include "panoworld/common/image_io.hpp"
#include "panoworld/eqa/evaluate.hpp"
#include "panoworld/eqa/suite.hpp"
#include "panoworld/explore/goal.hpp"
#include "panoworld/service/bev.hpp"
#include "panoworld/service/operations.hpp"
#include "panoworld/service/pointcloud.hpp"
#include "panoworld/service/server.hpp"
#include "panoworld/world/render.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <iomanip>
#include <memory>
#include <type_traits>

namespace panoworld::service {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return 1;
    case ErrorKind::Usage: return 2;
    case ErrorKind::DimensionMismatch: return 3;
    case ErrorKind::Render: return 4;
    case ErrorKind::NoFreePath: return 5;
    case ErrorKind::Sampling: return 6;
    case ErrorKind::Generator: return 7;
    case ErrorKind::Pilot: return 8;
    case ErrorKind::Contradiction: return 9;
    case ErrorKind::Policy: return 10;
    case ErrorKind::Protocol: return 11;
    case ErrorKind::UndefinedReport: return 12;
    case ErrorKind::Io: return 13;
    case ErrorKind::Transport: return 14;
  }
  return kInternalExit;
}

namespace {

/// Deferred writes of parsed flags into the request document. A flag given
/// on the command line overrides the config file; an absent flag only fills
/// keys the config file leaves unset.
struct Bind {
  CLI::App* app;
  std::function<void(json&)> apply;
};
using Binds = std::vector<Bind>;

json::json_pointer pointer(const std::string& key) { return json::json_pointer("/" + key); }

template <typename T>
CLI::Option* bind_flag(CLI::App* app, Binds& binds, const std::string& flag, const std::string& key, T fallback,
                  const std::string& help) {
  auto value = std::make_shared<T>(fallback);
  CLI::Option* o = nullptr;
  if constexpr (std::is_same_v<T, bool>) {
    o = app->add_flag(flag, *value, help);
  } else {
    o = app->add_option(flag, *value, help)->capture_default_str();
  }
  binds.push_back({app, [o, value, key](json& req) {
                     if (o->count() > 0 || !req.contains(pointer(key))) req[pointer(key)] = *value;
                   }});
  return o;
}

/// Like bind_flag, but the key is only written when the flag is given.
template <typename T>
CLI::Option* bind_optional(CLI::App* app, Binds& binds, const std::string& flag, const std::string& key,
                           const std::string& help) {
  auto value = std::make_shared<T>();
  CLI::Option* o = app->add_option(flag, *value, help);
  binds.push_back({app, [o, value, key](json& req) {
                     if (o->count() > 0) req[pointer(key)] = *value;
                   }});
  return o;
}

json read_json_file(const fs::path& file) {
  const json doc = json::parse(io::read_text(file), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::Protocol, "not JSON: " + file.string());
  return doc;
}

/// "TURN_DEG:DISTANCE[:FRAMES]".
json parse_step(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    const std::string piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    char* end = nullptr;
    const double v = std::strtod(piece.c_str(), &end);
    if (piece.empty() || *end) throw Error(ErrorKind::Usage, "bad step '" + text + "', expected TURN_DEG:DISTANCE[:FRAMES]");
    parts.push_back(v);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorKind::Usage, "bad step '" + text + "'");
  json j = {{"turn_deg", parts[0]}, {"distance", parts[1]}};
  if (parts.size() == 3) j["frame_count"] = static_cast<int>(parts[2]);
  return j;
}

void write_image(const fs::path& file, const Image& image) {
  if (file.extension() == ".pfm") {
    io::write_pfm(file, image);
  } else {
    io::write_png(file, image);
  }
}

std::string percent(const json& v) {
  if (v.is_null()) return "undefined";
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << 100.0 * v.get<double>() << "%";
  return s.str();
}

void eqa_summary(std::ostream& out, const json& report) {
  const json& m = report.at("metrics");
  out << report.value("agent", "") << " [" << report.value("mode", "") << "] decision_accuracy "
      << percent(m.at("decision_accuracy")) << ", gold_confidence " << percent(m.at("gold_action_confidence"))
      << ", logic_accuracy " << (m.contains("logic_accuracy") ? percent(m["logic_accuracy"]) : "absent") << ", valid "
      << report.at("counts").at("valid") << "/" << report.at("counts").at("total") << "\n";
}

/// Scene, pose, view and generator flags shared by the exploration commands.
void scene_flags(CLI::App* app, Binds& binds, std::shared_ptr<std::string> scene_file) {
  app->add_option("--scene", *scene_file, "Scene file (from `scene gen`); otherwise --scene-seed")
      ->check(CLI::ExistingFile);
  bind_flag<std::uint64_t>(app, binds, "--scene-seed", "seed", 0, "Seed of a procedural scene");
  bind_flag<std::string>(app, binds, "--style", "params/style", "geometry", "Procedural style: geometry | low-texture");
  binds.push_back({app, [scene_file](json& req) {
                     if (!scene_file->empty()) req["scene"] = read_json_file(*scene_file);
                   }});
}

void pose_flags(CLI::App* app, Binds& binds) {
  bind_flag<double>(app, binds, "--x", "pose/x", 0.0, "Start x (m)");
  bind_flag<double>(app, binds, "--z", "pose/z", 0.0, "Start z (m)");
  bind_flag<double>(app, binds, "--yaw", "pose/yaw", 0.0, "Start heading (rad, +X toward +Z)");
}

void view_flags(CLI::App* app, Binds& binds, int width = 512, int height = 256) {
  bind_flag<int>(app, binds, "--width", "width", width, "Panorama width");
  bind_flag<int>(app, binds, "--height", "height", height, "Panorama height");
}

void generator_flags(CLI::App* app, Binds& binds) {
  bind_flag<std::string>(app, binds, "--generator", "generator/kind", "oracle", "oracle | noisy-oracle | external");
  bind_flag<double>(app, binds, "--sigma", "generator/sigma", 0.0, "Noise level of noisy-oracle");
  bind_optional<std::vector<std::string>>(app, binds, "--generator-command", "generator/command",
                                          "argv of an external generator");
}

std::vector<explore::ExplorationConfig> steps_of(const json& req) {
  std::vector<explore::ExplorationConfig> out;
  for (const json& s : req.value("steps", json::array())) out.push_back(config_from_request(s));
  return out;
}

explore::SessionRecipe recipe_of(const json& req) {
  return recipe_from_request(std::make_shared<const world::Scene>(scene_from_request(req)), req);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"panoworld: panoramic world exploration, loop-closure metrics and embodied QA"};
  app.name("panoworld");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_file;
  bool error_json = false;
  app.add_option("--config", config_file, "JSON config providing defaults for any request key")->check(CLI::ExistingFile);
  app.add_flag("--error-json", error_json, "Print errors as {\"error\": {kind, message, detail}} on stderr");

  Binds binds;
  std::function<void(json&)> action;
  auto out_file = std::make_shared<std::string>();
  auto scene_file = std::make_shared<std::string>();
  auto step_texts = std::make_shared<std::vector<std::string>>();
  auto add_out = [&](CLI::App* c, const std::string& help) { c->add_option("--out", *out_file, help); };
  auto add_steps = [&](CLI::App* c) {
    c->add_option("--step", *step_texts, "TURN_DEG:DISTANCE[:FRAMES], repeatable; write negative turns as --step=-90:4");
    binds.push_back({c, [step_texts](json& req) {
                       if (step_texts->empty()) return;
                       json steps = json::array();
                       for (const auto& t : *step_texts) steps.push_back(parse_step(t));
                       req["steps"] = steps;
                     }});
  };
  auto optional_out = [&]() -> std::optional<std::string> {
    if (out_file->empty()) return std::nullopt;
    return *out_file;
  };
  auto need_out = [&]() -> fs::path {
    if (out_file->empty()) throw Error(ErrorKind::Usage, "--out is required");
    return *out_file;
  };

  // scene gen
  auto* scene = app.add_subcommand("scene", "Procedural scenes")->require_subcommand(1);
  auto* scene_gen = scene->add_subcommand("gen", "Generate a scene file");
  bind_flag<std::uint64_t>(scene_gen, binds, "--seed", "seed", 0, "Scene seed");
  bind_flag<std::string>(scene_gen, binds, "--style", "params/style", "geometry", "geometry | low-texture");
  bind_flag<double>(scene_gen, binds, "--extent", "params/extent", 30.0, "Half side of the populated square (m)");
  bind_flag<double>(scene_gen, binds, "--density", "params/density", 0.02, "Primitives per square meter");
  add_out(scene_gen, "Scene file (stdout when absent)");
  scene_gen->callback([&] {
    action = [&](json& req) {
      const std::string text = world::serialize(scene_from_request(req));
      if (auto f = optional_out()) {
        io::write_text(*f, text);
      } else {
        out << text;
      }
    };
  });

  // render
  auto* render = app.add_subcommand("render", "Oracle panorama (or depth) of a scene");
  scene_flags(render, binds, scene_file);
  pose_flags(render, binds);
  view_flags(render, binds);
  bind_flag<int>(render, binds, "--supersample", "supersample", 1, "Rays per pixel side");
  bind_flag<bool>(render, binds, "--depth", "depth", false, "Write the depth map (PFM) instead");
  add_out(render, "Image file: .png or .pfm");
  render->callback([&] {
    action = [&](json& req) {
      const fs::path file = need_out();
      const world::Scene s = scene_from_request(req);
      const world::Pose pose = pose_from_request(s, req["pose"]);
      if (req["depth"].get<bool>()) {
        io::write_pfm(file, world::render_depth(s, pose, req["width"], req["height"]));
        return;
      }
      world::RenderOptions ro;
      ro.supersample = req["supersample"];
      write_image(file, world::render_panorama(s, pose, req["width"], req["height"], ro));
    };
  });

  // explore step | loop | goal
  auto* explore = app.add_subcommand("explore", "Imaginative exploration")->require_subcommand(1);
  auto* step = explore->add_subcommand("step", "Run a list of exploration configs and log the trajectory");
  scene_flags(step, binds, scene_file);
  pose_flags(step, binds);
  view_flags(step, binds);
  generator_flags(step, binds);
  bind_flag<std::uint64_t>(step, binds, "--seed", "session/seed", 0, "Session seed (per-step generator seeds)");
  add_steps(step);
  add_out(step, "Output directory: trajectory.jsonl, frames/, final.png, final.pfm, summary.json");
  step->callback([&] {
    action = [&](json& req) {
      const fs::path dir = need_out();
      const explore::SessionRecipe recipe = recipe_of(req);
      explore::ExplorationSession session = recipe.build();
      explore::TrajectoryLog log(dir / "trajectory.jsonl", recipe, session);
      for (const auto& c : steps_of(req)) log.append(session, session.step(c));
      io::write_png(dir / "final.png", session.current_view());
      io::write_pfm(dir / "final.pfm", session.current_view());
      const json summary = {{"steps", session.step_count()},
                            {"pose", world::to_json(session.imagined_pose())},
                            {"net_heading", session.net_heading()},
                            {"digest", explore::digest_hex(session.current_view())}};
      io::write_text(dir / "summary.json", summary.dump(1) + "\n");
      out << summary.dump() << "\n";
    };
  });

  auto* loop = explore->add_subcommand("loop", "Sample closed loops and report their loop-closure error");
  bind_flag<std::uint64_t>(loop, binds, "--seed", "seed", 0, "Loop sampling seed");
  bind_flag<int>(loop, binds, "--loops", "n_loops", 1, "Number of loops");
  view_flags(loop, binds);
  generator_flags(loop, binds);
  add_out(loop, "Report file (stdout when absent)");
  loop->callback([&] {
    action = [&](json& req) {
      const metrics::IelcReport r = ielc_request(req);
      const json doc = r.to_json();
      if (auto f = optional_out()) {
        io::write_text(*f, doc.dump(1) + "\n");
        out << "IELC " << std::setprecision(17) << r.mean << " over " << r.valid << " loop(s)\n";
      } else {
        out << doc.dump(1) << "\n";
      }
    };
  });

  auto* goal = explore->add_subcommand("goal", "Goal-driven exploration with a pilot");
  scene_flags(goal, binds, scene_file);
  pose_flags(goal, binds);
  view_flags(goal, binds);
  generator_flags(goal, binds);
  bind_flag<std::uint64_t>(goal, binds, "--seed", "session/seed", 0, "Session seed");
  bind_flag<std::string>(goal, binds, "--goal", "goal", "", "Goal text, e.g. 'go to the red box'")->required();
  bind_flag<std::string>(goal, binds, "--pilot", "pilot", "target", "target | http (PANOWORLD_PILOT_URL)");
  bind_flag<int>(goal, binds, "--budget", "budget", 10, "Maximum number of steps");
  bind_flag<int>(goal, binds, "--face-size", "face_size", 128, "Cube face size shown to the pilot");
  add_out(goal, "Output directory: trajectory.jsonl, outcome.json, final.png");
  goal->callback([&] {
    action = [&](json& req) {
      const fs::path dir = need_out();
      const explore::SessionRecipe recipe = recipe_of(req);
      explore::ExplorationSession session = recipe.build();
      const std::string text = req["goal"];
      std::unique_ptr<explore::Pilot> pilot;
      if (req["pilot"] == "target") {
        const int target = explore::resolve_goal_target(*recipe.scene, text);
        if (target < 0) throw Error(ErrorKind::Domain, "goal names nothing in the scene: " + text);
        pilot = std::make_unique<explore::TargetPilot>(recipe.scene, target);
      } else if (req["pilot"] == "http") {
        const char* url = std::getenv("PANOWORLD_PILOT_URL");
        if (!url || !*url) throw Error(ErrorKind::Usage, "set PANOWORLD_PILOT_URL for the http pilot");
        pilot = std::make_unique<explore::HttpPilot>(url);
      } else {
        throw Error(ErrorKind::Usage, "unknown pilot " + req["pilot"].get<std::string>());
      }
      explore::TrajectoryLog log(dir / "trajectory.jsonl", recipe, session);
      const int before = session.step_count();
      const explore::GoalOutcome outcome = explore::run_goal_driven(session, text, *pilot, req["budget"], req["face_size"]);
      for (int k = before; k < session.step_count(); ++k) {
        const auto& h = session.history()[static_cast<std::size_t>(k)];
        log.append(k, h, h.frames);
      }
      io::write_png(dir / "final.png", session.current_view());
      json traj = json::array();
      for (const auto& c : outcome.trajectory) traj.push_back(explore::to_json(c));
      const json doc = {{"status", outcome.status == explore::GoalStatus::Stopped ? "stopped" : "budget-exhausted"},
                        {"steps", session.step_count()},
                        {"pose", world::to_json(session.imagined_pose())},
                        {"trajectory", traj},
                        {"responses", outcome.responses},
                        {"digest", explore::digest_hex(session.current_view())}};
      io::write_text(dir / "outcome.json", doc.dump(1) + "\n");
      out << doc.dump() << "\n";
    };
  });

  // ielc run
  auto* ielc = app.add_subcommand("ielc", "Loop-closure evaluation")->require_subcommand(1);
  auto* ielc_run = ielc->add_subcommand("run", "Run the loop-closure protocol");
  bind_flag<std::uint64_t>(ielc_run, binds, "--seed", "seed", 0, "Loop sampling seed");
  bind_flag<int>(ielc_run, binds, "--loops", "n_loops", 1000, "Number of loops");
  bind_flag<int>(ielc_run, binds, "--max-rotations", "max_rotations", 9, "Most turns per loop");
  bind_flag<double>(ielc_run, binds, "--max-distance", "max_distance", 20.0, "Longest loop (m)");
  bind_flag<int>(ielc_run, binds, "--supersample", "supersample", 1, "Rays per pixel side");
  view_flags(ielc_run, binds);
  generator_flags(ielc_run, binds);
  auto csv_file = std::make_shared<std::string>();
  ielc_run->add_option("--csv", *csv_file, "Per-loop CSV");
  add_out(ielc_run, "Report file (stdout when absent)");
  ielc_run->callback([&] {
    action = [&](json& req) {
      const metrics::IelcReport r = ielc_request(req);
      if (!csv_file->empty()) io::write_text(*csv_file, r.to_csv());
      if (auto f = optional_out()) {
        io::write_text(*f, r.to_json().dump(1) + "\n");
        out << r.format_grid();
      } else {
        out << r.to_json().dump(1) << "\n";
      }
    };
  });

  // dataset gen
  auto* dataset = app.add_subcommand("dataset", "Training-style panorama videos")->require_subcommand(1);
  auto* dataset_gen = dataset->add_subcommand("gen", "Render straight-path panorama videos");
  scene_flags(dataset_gen, binds, scene_file);
  bind_flag<int>(dataset_gen, binds, "--paths", "paths", 1, "Number of paths");
  bind_flag<std::uint64_t>(dataset_gen, binds, "--path-seed", "path_seed", 0, "Path sampling seed");
  bind_flag<int>(dataset_gen, binds, "--supersample", "supersample", 1, "Rays per pixel side");
  view_flags(dataset_gen, binds, 1024, 512);
  add_out(dataset_gen, "Output directory");
  dataset_gen->callback([&] {
    action = [&](json& req) {
      const json manifest = dataset_request(req, need_out());
      out << "wrote " << manifest.at("paths").size() << " path(s) to " << *out_file << "\n";
    };
  });

  // eqa run | suite
  auto* eqa_cmd = app.add_subcommand("eqa", "Embodied question answering")->require_subcommand(1);
  auto* eqa_run = eqa_cmd->add_subcommand("run", "Evaluate an agent on a suite");
  bind_flag<std::string>(eqa_run, binds, "--agent", "agent", "random",
                    "random | omniscient | rule | rule-probabilistic | http (PANOWORLD_AGENT_URL) | http:<url>");
  bind_flag<std::uint64_t>(eqa_run, binds, "--seed", "seed", 0, "Agent seed");
  bind_flag<std::string>(eqa_run, binds, "--mode", "mode", "multimodal", "unimodal | multimodal | imagination | all");
  bind_optional<std::string>(eqa_run, binds, "--judge", "judge", "stub | http (PANOWORLD_JUDGE_URL) | http:<url>");
  bind_optional<std::string>(eqa_run, binds, "--suite", "suite", "Suite file (built-in suite when absent)");
  bind_optional<std::string>(eqa_run, binds, "--transcripts", "transcripts", "Transcript log (JSONL)");
  bind_flag<int>(eqa_run, binds, "--max-concurrent", "max_concurrent_requests", 4, "Cap on simultaneous external calls");
  generator_flags(eqa_run, binds);
  add_out(eqa_run, "Report file (stdout when absent)");
  eqa_run->callback([&] {
    action = [&](json& req) {
      const json report = eqa_request(req);
      if (auto f = optional_out()) {
        io::write_text(*f, report.dump(1) + "\n");
        if (report.contains("reports")) {
          for (const json& r : report["reports"]) eqa_summary(out, r);
        } else {
          eqa_summary(out, report);
        }
      } else {
        out << report.dump(1) << "\n";
      }
    };
  });
  auto* eqa_suite = eqa_cmd->add_subcommand("suite", "Write the built-in suite to a file");
  bind_flag<std::uint64_t>(eqa_suite, binds, "--seed", "suite_options/seed", 7, "Layout seed");
  eqa_suite->callback([&] {
    action = [&](json& req) {
      eqa::SuiteOptions so;
      so.seed = req["suite_options"]["seed"];
      const auto suite = eqa::builtin_suite(so);
      eqa::write_suite(need_out(), suite);
      out << "wrote " << suite.size() << " scenarios to " << *out_file << "\n";
    };
  });
  add_out(eqa_suite, "Suite file");

  // pointcloud
  auto* cloud = app.add_subcommand("pointcloud", "Back-project a panorama and its depth to a colored point cloud");
  auto pano_file = std::make_shared<std::string>();
  auto depth_file = std::make_shared<std::string>();
  cloud->add_option("--pano", *pano_file, "Panorama (.png or .pfm); with --depth")->check(CLI::ExistingFile);
  cloud->add_option("--depth", *depth_file, "Depth map (.pfm)")->check(CLI::ExistingFile);
  scene_flags(cloud, binds, scene_file);
  pose_flags(cloud, binds);
  view_flags(cloud, binds);
  bind_flag<std::string>(cloud, binds, "--frame", "frame", "world", "world | camera coordinates");
  add_out(cloud, "PLY file");
  cloud->callback([&] {
    action = [&](json& req) {
      const fs::path file = need_out();
      if (!pano_file->empty() || !depth_file->empty()) {
        if (pano_file->empty() || depth_file->empty()) throw Error(ErrorKind::Usage, "--pano and --depth go together");
        const Panorama pano = fs::path(*pano_file).extension() == ".pfm" ? io::read_pfm(*pano_file) : io::read_png(*pano_file);
        write_ply(file, depth_to_points(pano, io::read_pfm_scalar(*depth_file)));
        return;
      }
      const world::Scene s = scene_from_request(req);
      const world::Pose pose = pose_from_request(s, req["pose"]);
      const int w = req["width"], h = req["height"];
      const std::optional<world::Pose> frame = req["frame"] == "world" ? std::optional(pose) : std::nullopt;
      write_ply(file, depth_to_points(world::render_panorama(s, pose, w, h), world::render_depth(s, pose, w, h), frame));
    };
  });

  // bev
  auto* bev = app.add_subcommand("bev", "Bird's-eye view from imagined vertical exploration");
  scene_flags(bev, binds, scene_file);
  pose_flags(bev, binds);
  view_flags(bev, binds);
  generator_flags(bev, binds);
  bind_flag<std::uint64_t>(bev, binds, "--seed", "session/seed", 0, "Session seed");
  add_steps(bev);
  bind_flag<double>(bev, binds, "--altitude", "altitude", 30.0, "Climb (m) before looking down");
  bind_flag<int>(bev, binds, "--face-size", "face_size", 256, "Output side length");
  add_out(bev, "Image file: .png or .pfm");
  bev->callback([&] {
    action = [&](json& req) {
      const fs::path file = need_out();
      explore::ExplorationSession session = recipe_of(req).build();
      for (const auto& c : steps_of(req)) session.step(c);
      write_image(file, bird_eye_view(session, req["altitude"], req["face_size"]));
    };
  });

  // replay
  auto* replay = app.add_subcommand("replay", "Re-execute a trajectory log and compare every frame bit for bit");
  auto log_file = std::make_shared<std::string>();
  replay->add_option("log", *log_file, "trajectory.jsonl")->required()->check(CLI::ExistingFile);
  add_out(replay, "Write the final view here (.png or .pfm)");
  replay->callback([&] {
    action = [&](json&) {
      const explore::ReplayReport r = explore::replay_trajectory(*log_file);
      if (auto f = optional_out()) write_image(*f, r.final_view);
      const json doc = {{"steps", r.steps},
                        {"frames_checked", r.frames_checked},
                        {"mismatches", r.mismatches},
                        {"problems", r.problems},
                        {"identical", r.identical()},
                        {"digest", explore::digest_hex(r.final_view)}};
      out << doc.dump() << "\n";
      if (!r.identical()) throw Error(ErrorKind::Domain, "replay diverged from the log", doc.dump());
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  auto root = std::make_shared<std::string>("panoworld-data");
  auto host = std::make_shared<std::string>("127.0.0.1");
  auto port = std::make_shared<int>(8080);
  auto workers = std::make_shared<int>(2);
  serve->add_option("--root", *root, "Store directory")->capture_default_str();
  serve->add_option("--host", *host, "Listen address")->capture_default_str();
  serve->add_option("--port", *port, "Listen port (0 picks one)")->capture_default_str();
  serve->add_option("--workers", *workers, "Job worker threads")->capture_default_str();
  serve->callback([&] {
    action = [&](json&) {
      Server server({*root, *workers, 8});
      const int bound = server.bind(*host, *port);
      out << "listening on http://" << *host << ":" << bound << "\n" << std::flush;
      server.run();
    };
  });

  std::vector<std::string> argv_store{"panoworld"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  auto fail = [&](std::string_view kind, int code, const std::string& message, const std::string& detail) {
    if (error_json) {
      err << json{{"error", {{"kind", kind}, {"message", message}, {"detail", detail}}}, {"exit_code", code}}.dump() << "\n";
    } else {
      err << "panoworld: " << message << (detail.empty() ? "" : " (" + detail + ")") << "\n";
    }
    return code;
  };

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    // Help requested on a subcommand surfaces here too.
    if (e.get_exit_code() == 0) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().back()->help());
      return 0;
    }
    return fail("usage", exit_code(ErrorKind::Usage), e.what(), "");
  } catch (const Error& e) {
    return fail(to_string(e.kind()), exit_code(e.kind()), e.what(), e.detail());
  }

  try {
    json req = config_file.empty() ? json::object() : read_json_file(config_file);
    if (!req.is_object()) throw Error(ErrorKind::Usage, "config must be a JSON object");
    for (const auto& b : binds) {
      if (b.app->parsed()) b.apply(req);
    }
    if (!action) throw Error(ErrorKind::Usage, "no command given");
    action(req);
    return 0;
  } catch (const NotFound& e) {
    return fail("not-found", exit_code(ErrorKind::Io), e.what(), "");
  } catch (const Error& e) {
    return fail(to_string(e.kind()), exit_code(e.kind()), e.what(), e.detail());
  } catch (const json::exception& e) {
    return fail("protocol", exit_code(ErrorKind::Protocol), std::string("malformed input: ") + e.what(), "");
  } catch (const std::exception& e) {
    return fail("internal", kInternalExit, e.what(), "");
  }
}

}  // namespace panoworld::service
