#include "panoworld/service/operations.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/eqa/evaluate.hpp"
#include "panoworld/eqa/suite.hpp"
#include "panoworld/world/dataset.hpp"

#include <atomic>
#include <cstdlib>

namespace panoworld::service {

using nlohmann::json;

namespace {

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed ") + what + ": " + e.what());
  }
}

std::string endpoint(const std::string& spec, const char* env) {
  if (spec != "http") return spec;
  const char* url = std::getenv(env);
  if (!url || !*url) throw Error(ErrorKind::Usage, std::string("set ") + env + " for the http client");
  return std::string("http:") + url;
}

}  // namespace

world::SceneParams scene_params_from_json(const json& p) {
  return guarded("scene params", [&] {
    world::SceneParams s;
    s.extent = p.value("extent", s.extent);
    s.density = p.value("density", s.density);
    s.min_count = p.value("min_count", s.min_count);
    s.max_count = p.value("max_count", s.max_count);
    const std::string style = p.value("style", std::string("geometry"));
    if (style != "geometry" && style != "low-texture") throw Error(ErrorKind::Usage, "unknown style " + style);
    s.style = style == "low-texture" ? world::SceneStyle::LowTexture : world::SceneStyle::Geometry;
    s.spawn_radius = p.value("spawn_radius", s.spawn_radius);
    s.ground_tile = p.value("ground_tile", s.ground_tile);
    return s;
  });
}

world::Scene scene_from_request(const json& req) {
  if (req.contains("scene")) return world::scene_from_json(req.at("scene"));
  return guarded("scene request", [&] {
    return world::generate_scene(req.value("seed", std::uint64_t{0}),
                                 scene_params_from_json(req.value("params", json::object())));
  });
}

world::Pose pose_from_request(const world::Scene& scene, const json& doc) {
  return guarded("pose", [&] {
    world::Pose p = world::eye_pose(scene, doc.value("x", 0.0), doc.value("z", 0.0), doc.value("yaw", 0.0));
    if (doc.contains("y")) p.position.y() = doc["y"].get<double>();
    p.validate();
    return p;
  });
}

explore::ExplorationConfig config_from_request(const json& doc) {
  return guarded("step config", [&] {
    double turn = doc.value("heading_change", 0.0);
    if (doc.contains("turn_deg") && !doc.contains("heading_change")) turn = doc["turn_deg"].get<double>() * geo::kPi / 180.0;
    const double distance = doc.value("distance", 0.0);
    explore::ExplorationConfig c = explore::ExplorationConfig::from_distance(turn, distance);
    if (doc.contains("frame_count")) c.frame_count = doc["frame_count"].get<int>();
    c.climb = doc.value("climb", 0.0);
    c.validate();
    return c;
  });
}

explore::SessionRecipe recipe_from_request(std::shared_ptr<const world::Scene> scene, const json& req) {
  return guarded("session request", [&] {
    explore::SessionRecipe r;
    r.origin_pose = pose_from_request(*scene, req.value("pose", json::object()));
    r.scene = std::move(scene);
    r.width = req.value("width", 512);
    r.height = req.value("height", 256);
    r.generator = explore::GeneratorSpec::from_json(req.value("generator", json::object()));
    const json s = req.value("session", json::object());
    r.options.seed = s.value("seed", std::uint64_t{0});
    r.options.final_only = s.value("final_only", false);
    const std::string retention = s.value("retention", std::string("all"));
    if (retention != "all" && retention != "last-frame") throw Error(ErrorKind::Usage, "unknown retention " + retention);
    r.options.retention = retention == "all" ? explore::HistoryRetention::All : explore::HistoryRetention::LastFrame;
    if (r.width < 2 || r.height < 1) throw Error(ErrorKind::Domain, "bad view size");
    return r;
  });
}

metrics::IelcReport ielc_request(const json& req, const ProgressFn& progress) {
  const auto [opts, spec] = guarded("ielc request", [&] {
    json flat = req;
    if (req.contains("loops") && !req.contains("n_loops")) flat["n_loops"] = req["loops"];
    metrics::IelcOptions o = metrics::ielc_options_from_json(flat);
    o.supersample = req.value("supersample", 1);
    if (req.contains("scene_params")) o.scene_params = scene_params_from_json(req["scene_params"]);
    explore::GeneratorSpec g = explore::GeneratorSpec::from_json(req.value("generator", json::object()));
    if (req.contains("supersample")) g.supersample = o.supersample;
    return std::pair{o, g};
  });
  metrics::IelcOptions o = opts;
  if (o.n_loops < 1) throw Error(ErrorKind::Domain, "need at least one loop");
  if (progress) o.progress = [&](int done, int total) { progress(static_cast<double>(done) / total); };
  return metrics::run_ielc(spec, o);
}

json eqa_request(const json& req, const ProgressFn& progress) {
  const std::string agent_spec = endpoint(req.value("agent", std::string("random")), "PANOWORLD_AGENT_URL");
  const std::uint64_t seed = req.value("seed", std::uint64_t{0});
  const auto agent = eqa::make_agent(agent_spec, seed);
  std::unique_ptr<eqa::Judge> judge;
  if (req.contains("judge") && !req["judge"].is_null()) {
    judge = eqa::make_judge(endpoint(req["judge"].get<std::string>(), "PANOWORLD_JUDGE_URL"));
  }
  std::vector<eqa::Scenario> suite;
  if (req.contains("suite") && req["suite"].is_string()) {
    suite = eqa::read_suite(req["suite"].get<std::string>());
  } else {
    eqa::SuiteOptions so;
    const json s = req.value("suite_options", json::object());
    so.seed = s.value("seed", so.seed);
    so.single_pairs = s.value("single_pairs", so.single_pairs);
    so.multi_pairs = s.value("multi_pairs", so.multi_pairs);
    so.view_width = s.value("width", so.view_width);
    so.view_height = s.value("height", so.view_height);
    suite = eqa::builtin_suite(so);
  }
  const std::string mode = req.value("mode", std::string("multimodal"));
  std::vector<eqa::Mode> modes;
  if (mode == "all") {
    modes = {eqa::Mode::Unimodal, eqa::Mode::Multimodal, eqa::Mode::Imagination};
  } else {
    modes = {eqa::mode_from_name(mode)};
  }
  eqa::EvalOptions o;
  o.judge = judge.get();
  o.generator = explore::GeneratorSpec::from_json(req.value("generator", json::object()));
  o.max_concurrent_requests = req.value("max_concurrent_requests", 4);
  if (req.contains("prompt_template")) o.prompt_template = req["prompt_template"].get<std::string>();
  std::atomic<int> done{0};
  const int total = static_cast<int>(suite.size() * modes.size());
  if (progress) o.progress = [&](int, int) { progress(static_cast<double>(++done) / total); };
  json reports = json::array();
  for (eqa::Mode m : modes) {
    o.mode = m;
    const eqa::EqaReport r = eqa::evaluate(suite, *agent, o);
    if (req.contains("transcripts") && req["transcripts"].is_string()) {
      std::string file = req["transcripts"].get<std::string>();
      if (modes.size() > 1) file += "." + std::string(eqa::mode_name(m));
      r.write_transcripts(file);
    }
    json j = r.to_json();
    j["seed"] = seed;
    reports.push_back(std::move(j));
  }
  if (modes.size() == 1) return reports[0];
  return {{"schema", "panoworld.eqa-modes/1"}, {"reports", reports}};
}

json dataset_request(const json& req, const std::filesystem::path& dir, const ProgressFn& progress) {
  const world::Scene scene = scene_from_request(req);
  world::DatasetOptions o;
  guarded("dataset request", [&] {
    o.n_paths = req.value("paths", 1);
    o.width = req.value("width", 1024);
    o.height = req.value("height", 512);
    o.render.supersample = req.value("supersample", 1);
    return 0;
  });
  if (o.n_paths < 1) throw Error(ErrorKind::Domain, "need at least one path");
  json manifest = world::write_dataset(scene, o, req.value("path_seed", req.value("seed", std::uint64_t{0})), dir);
  if (progress) progress(1.0);
  return manifest;
}

}  // namespace panoworld::service
