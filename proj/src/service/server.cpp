#include "panoworld/service/server.hpp"

#include "panoworld/belief/update.hpp"
#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"
#include "panoworld/eqa/evaluate.hpp"
#include "panoworld/eqa/suite.hpp"
#include "panoworld/explore/goal.hpp"
#include "panoworld/geometry/cubemap.hpp"
#include "panoworld/geometry/perspective.hpp"
#include "panoworld/service/bev.hpp"
#include "panoworld/service/operations.hpp"
#include "panoworld/service/pointcloud.hpp"
#include "panoworld/world/render.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace panoworld::service {

namespace fs = std::filesystem;
using nlohmann::json;
using httplib::Request;
using httplib::Response;

int http_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Protocol:
      return 400;
    case ErrorKind::Domain:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::Render:
    case ErrorKind::NoFreePath:
    case ErrorKind::Sampling:
    case ErrorKind::Contradiction:
      return 422;
    case ErrorKind::Pilot:
    case ErrorKind::Transport:
      return 502;
    default:
      return 500;
  }
}

namespace {

/// A reply computed by a handler; kept as JSON so it can be stored under a
/// request token and replayed verbatim.
struct Reply {
  int status = 200;
  json body;
};

json error_body(std::string_view kind, const std::string& message, const std::string& detail = {}) {
  return {{"error", {{"kind", kind}, {"message", message}, {"detail", detail}}}};
}

void send(Response& res, const Reply& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

void send_bytes(Response& res, const io::Bytes& bytes, const std::string& type) {
  res.status = 200;
  res.set_content(std::string(bytes.begin(), bytes.end()), type);
}

template <typename F>
void guard(Response& res, F&& f) {
  try {
    f();
  } catch (const NotFound& e) {
    send(res, {404, error_body("not-found", e.what())});
  } catch (const Error& e) {
    send(res, {http_status(e.kind()), error_body(to_string(e.kind()), e.what(), e.detail())});
  } catch (const json::exception& e) {
    send(res, {400, error_body("protocol", std::string("malformed request: ") + e.what())});
  } catch (const std::exception& e) {
    send(res, {500, error_body("internal", e.what())});
  }
}

json body_of(const Request& req) {
  if (req.body.empty()) return json::object();
  json doc = json::parse(req.body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorKind::Protocol, "request body must be a JSON object");
  return doc;
}

std::string query(const Request& req, const char* key, const std::string& fallback) {
  return req.has_param(key) ? req.get_param_value(key) : fallback;
}

double query(const Request& req, const char* key, double fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end) throw Error(ErrorKind::Usage, std::string("query parameter ") + key + " is not a number");
  return d;
}

int query(const Request& req, const char* key, int fallback) {
  const double d = query(req, key, static_cast<double>(fallback));
  if (d != static_cast<int>(d)) throw Error(ErrorKind::Usage, std::string("query parameter ") + key + " is not an integer");
  return static_cast<int>(d);
}

std::optional<std::string> request_token(const Request& req, const json& body) {
  if (body.contains("request_token")) return body["request_token"].get<std::string>();
  if (req.has_header("X-Request-Token")) return req.get_header_value("X-Request-Token");
  return std::nullopt;
}

/// Renders an image as PNG or PFM bytes.
void send_image(Response& res, const Image& image, const std::string& encoding, const fs::path& scratch) {
  if (encoding == "png") {
    send_bytes(res, io::encode_png(image), "image/png");
  } else if (encoding == "pfm") {
    io::write_pfm(scratch, image);
    const io::Bytes bytes = io::read_file(scratch);
    fs::remove(scratch);
    send_bytes(res, bytes, "application/x-portable-floatmap");
  } else {
    throw Error(ErrorKind::Usage, "unknown encoding " + encoding);
  }
}

json history_json(const explore::ExplorationSession& s) {
  json out = json::array();
  for (const auto& h : s.history()) {
    out.push_back({{"config", explore::to_json(h.config)},
                   {"pose_before", world::to_json(h.pose_before)},
                   {"pose_after", world::to_json(h.pose_after)},
                   {"frames", h.frames.size()}});
  }
  return out;
}

}  // namespace

struct Server::Impl {
  ServerOptions options;
  SessionStore store;
  JobManager jobs;
  httplib::Server http;
  std::thread thread;
  std::mutex token_mutex;  // serializes tokened requests outside a session
  std::atomic<std::uint64_t> scratch_counter{0};

  std::once_flag suite_once;
  std::vector<eqa::Scenario> suite;
  std::mutex report_mutex;

  explicit Impl(ServerOptions o)
      : options(std::move(o)), store(options.root), jobs(options.root / "jobs", options.job_workers) {
    const int threads = options.http_threads;
    http.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
    routes();
  }

  fs::path scratch() {
    fs::create_directories(options.root / "tmp");
    return options.root / "tmp" / ("scratch-" + std::to_string(scratch_counter++) + ".pfm");
  }

  const std::vector<eqa::Scenario>& builtin() {
    std::call_once(suite_once, [&] { suite = eqa::builtin_suite(); });
    return suite;
  }

  const eqa::Scenario& scenario(const std::string& id) {
    for (const auto& s : builtin()) {
      if (s.id == id) return s;
    }
    throw NotFound("no scenario " + id);
  }

  /// Runs `fn` once per request token in `scope`; repeats get the stored reply.
  Reply idempotent(const std::string& scope, const std::optional<std::string>& token, const std::function<Reply()>& fn) {
    if (!token) return fn();
    if (auto seen = store.token(scope, *token)) return {seen->at("status").get<int>(), seen->at("body")};
    Reply r = fn();
    if (r.status < 300) store.put_token(scope, *token, {{"status", r.status}, {"body", r.body}});
    return r;
  }

  Reply global_idempotent(const Request& req, const json& body, const std::function<Reply()>& fn) {
    const auto token = request_token(req, body);
    if (!token) return fn();
    std::lock_guard lock(token_mutex);
    return idempotent("global", token, fn);
  }

  json session_summary(const StoredSession& s) {
    const auto& sess = s.session;
    json j = {{"session_id", s.id},
              {"steps", sess.step_count()},
              {"version", sess.step_count()},
              {"pose", world::to_json(sess.imagined_pose())},
              {"net_heading", sess.net_heading()},
              {"digest", explore::digest_hex(sess.current_view())},
              {"view_url", "/sessions/" + s.id + "/view?format=pano"},
              {"view_pfm_url", "/sessions/" + s.id + "/view?format=pano&encoding=pfm"},
              {"parent", s.parent ? json(*s.parent) : json(nullptr)},
              {"parent_step", s.parent_step}};
    return j;
  }

  json step_reply(const StoredSession& s, std::size_t frames, bool with_view) {
    json j = session_summary(s);
    j["frames"] = frames;
    json urls = json::array();
    const int step = s.session.step_count();
    for (std::size_t f = 1; f <= frames; ++f) {
      urls.push_back("/sessions/" + s.id + "/view?format=pano&step=" + std::to_string(step) + "&frame=" + std::to_string(f));
    }
    j["frame_urls"] = urls;
    if (with_view) j["view"] = {{"encoding", "png"}, {"data", io::base64_encode(io::encode_png(s.session.current_view()))}};
    return j;
  }

  std::shared_ptr<const world::Scene> scene_for(const json& body) {
    if (body.contains("scene_id")) return std::make_shared<const world::Scene>(store.get_scene(body["scene_id"]));
    return std::make_shared<const world::Scene>(scene_from_request(body));
  }

  /// Steps or pilots a copy so a failure leaves the stored session untouched.
  template <typename F>
  Reply mutate(const std::string& id, const json& body, const Request& req, F&& change) {
    auto stored = store.get(id);
    auto lock = store.writer_lock(id);
    std::unique_lock guard(*lock, std::try_to_lock);
    if (!guard.owns_lock()) return {409, error_body("conflict", "session " + id + " is being modified")};
    return idempotent(id, request_token(req, body), [&] {
      StoredSession next = *stored;
      json extra = change(next);
      store.save(next);
      *stored = std::move(next);
      return Reply{200, extra};
    });
  }

  const Panorama& pick_view(const explore::ExplorationSession& s, const Request& req) {
    if (!req.has_param("step")) return s.current_view();
    const int step = query(req, "step", 0);
    if (step == 0) return s.origin_view();
    if (step < 0 || step > s.step_count()) throw Error(ErrorKind::Domain, "no step " + std::to_string(step));
    const auto& frames = s.history()[static_cast<std::size_t>(step - 1)].frames;
    const int frame = query(req, "frame", static_cast<int>(frames.size()));
    if (frame < 1 || frame > static_cast<int>(frames.size())) {
      throw Error(ErrorKind::Domain, "step " + std::to_string(step) + " keeps no frame " + std::to_string(frame));
    }
    return frames[static_cast<std::size_t>(frame - 1)];
  }

  void send_view(Response& res, const Request& req, const Panorama& view) {
    const std::string format = query(req, "format", std::string("pano"));
    const std::string encoding = query(req, "encoding", std::string("png"));
    if (format == "pano") {
      send_image(res, view, encoding, scratch());
    } else if (format == "cube") {
      const int size = query(req, "face_size", view.height() / 2);
      const geo::CubeMap cube = geo::panorama_to_cubemap(view, size);
      if (req.has_param("face")) {
        const auto face = geo::face_from_name(req.get_param_value("face"));
        if (!face) throw Error(ErrorKind::Usage, "unknown face " + req.get_param_value("face"));
        send_image(res, cube.face(*face), encoding, scratch());
      } else if (query(req, "layout", std::string("faces")) == "strip") {
        send_image(res, geo::cubemap_strip(cube), encoding, scratch());
      } else {
        json faces = json::object();
        for (int f = 0; f < 6; ++f) {
          const auto face = static_cast<geo::Face>(f);
          faces[std::string(geo::face_name(face))] = io::base64_encode(io::encode_png(cube.face(face)));
        }
        send(res, {200, {{"face_size", size}, {"encoding", "png"}, {"faces", faces}}});
      }
    } else if (format == "perspective") {
      const geo::SphericalCoord heading{query(req, "yaw", 0.0), query(req, "pitch", 0.0)};
      const Image img = geo::perspective_view(view, heading, query(req, "fov", geo::kPi / 2), query(req, "width", 256),
                                              query(req, "height", 256));
      send_image(res, img, encoding, scratch());
    } else {
      throw Error(ErrorKind::Usage, "unknown format " + format);
    }
  }

  Reply submit(const std::string& kind, JobWork work) {
    const std::string id = jobs.submit(kind, std::move(work));
    return {202, jobs.get(id).to_json()};
  }

  std::optional<std::string> bound_scenario(const std::string& session) {
    const fs::path file = store.session_dir(session) / "scenario.json";
    if (!fs::exists(file)) return std::nullopt;
    return json::parse(io::read_text(file)).at("scenario").get<std::string>();
  }

  void routes();
};

void Server::Impl::routes() {
  http.Get("/health", [](const Request&, Response& res) { send(res, {200, {{"status", "ok"}}}); });

  // Scenes.
  http.Post("/scenes", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const json body = body_of(req);
      const std::string id = store.put_scene(scene_from_request(body));
      send(res, {201, {{"scene_id", id}, {"url", "/scenes/" + id}}});
    });
  });
  http.Get(R"(/scenes/([^/]+))", [this](const Request& req, Response& res) {
    guard(res, [&] {
      res.set_content(world::serialize(store.get_scene(req.matches[1])), "application/json");
    });
  });
  http.Get(R"(/scenes/([^/]+)/render)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const world::Scene scene = store.get_scene(req.matches[1]);
      json p = {{"x", query(req, "x", 0.0)}, {"z", query(req, "z", 0.0)}, {"yaw", query(req, "yaw", 0.0)}};
      if (req.has_param("y")) p["y"] = query(req, "y", 0.0);
      const world::Pose pose = pose_from_request(scene, p);
      const int w = query(req, "width", 512), h = query(req, "height", 256);
      if (query(req, "format", std::string("pano")) == "depth") {
        const fs::path tmp = scratch();
        io::write_pfm(tmp, world::render_depth(scene, pose, w, h));
        const io::Bytes bytes = io::read_file(tmp);
        fs::remove(tmp);
        send_bytes(res, bytes, "application/x-portable-floatmap");
        return;
      }
      world::RenderOptions ro;
      ro.supersample = query(req, "supersample", 1);
      send_image(res, world::render_panorama(scene, pose, w, h, ro), query(req, "encoding", std::string("png")), scratch());
    });
  });
  http.Get(R"(/scenes/([^/]+)/pointcloud)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const world::Scene scene = store.get_scene(req.matches[1]);
      const world::Pose pose =
          pose_from_request(scene, {{"x", query(req, "x", 0.0)}, {"z", query(req, "z", 0.0)}, {"yaw", query(req, "yaw", 0.0)}});
      const int w = query(req, "width", 512), h = query(req, "height", 256);
      const bool world_frame = query(req, "frame", std::string("world")) == "world";
      const auto points = depth_to_points(world::render_panorama(scene, pose, w, h), world::render_depth(scene, pose, w, h),
                                          world_frame ? std::optional(pose) : std::nullopt);
      res.set_content(to_ply(points), "text/plain");
    });
  });

  // Sessions.
  http.Post("/sessions", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const json body = body_of(req);
      send(res, global_idempotent(req, body, [&] {
        std::optional<std::string> bound;
        explore::SessionRecipe recipe;
        if (body.contains("scenario")) {
          const eqa::Scenario& s = scenario(body["scenario"]);
          json r = body;
          r["width"] = s.view_width;
          r["height"] = s.view_height;
          r.erase("pose");
          recipe = recipe_from_request(std::make_shared<const world::Scene>(s.true_scene()), r);
          recipe.origin_pose = s.self;
          bound = s.id;
        } else {
          recipe = recipe_from_request(scene_for(body), body);
        }
        const std::string scene_id = store.put_scene(*recipe.scene);
        const std::string id = store.create(recipe, recipe.build());
        if (bound) io::write_text(store.session_dir(id) / "scenario.json", json{{"scenario", *bound}}.dump() + "\n");
        auto stored = store.get(id);
        json j = step_reply(*stored, 0, body.value("include_view", true));
        j["scene_id"] = scene_id;
        j["scenario"] = bound ? json(*bound) : json(nullptr);
        return Reply{201, j};
      }));
    });
  });
  http.Get("/sessions", [this](const Request&, Response& res) {
    guard(res, [&] { send(res, {200, {{"sessions", store.list()}}}); });
  });
  http.Get(R"(/sessions/([^/]+))", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const std::string id = req.matches[1];
      auto stored = store.get(id);
      std::lock_guard lock(*store.writer_lock(id));
      json j = session_summary(*stored);
      j["recipe"] = stored->recipe.to_json();
      j["history"] = history_json(stored->session);
      j["scenario"] = bound_scenario(id) ? json(*bound_scenario(id)) : json(nullptr);
      send(res, {200, j});
    });
  });
  http.Post(R"(/sessions/([^/]+)/step)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const json body = body_of(req);
      const explore::ExplorationConfig config = config_from_request(body);
      const bool with_view = body.value("include_view", true);
      send(res, mutate(req.matches[1], body, req, [&](StoredSession& s) {
        const auto frames = s.session.step(config);
        return step_reply(s, frames.size(), with_view);
      }));
    });
  });
  http.Post(R"(/sessions/([^/]+)/goal)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const json body = body_of(req);
      const std::string goal = body.at("goal").get<std::string>();
      const int budget = body.value("budget", 10);
      const int face_size = body.value("face_size", 128);
      const std::string kind = body.value("pilot", std::string("target"));
      send(res, mutate(req.matches[1], body, req, [&](StoredSession& s) {
        std::unique_ptr<explore::Pilot> pilot;
        if (kind == "target") {
          const int target = explore::resolve_goal_target(*s.recipe.scene, goal);
          if (target < 0) throw Error(ErrorKind::Domain, "goal names nothing in the scene: " + goal);
          pilot = std::make_unique<explore::TargetPilot>(s.recipe.scene, target);
        } else if (kind == "scripted") {
          std::vector<explore::ExplorationConfig> script;
          for (const json& c : body.at("script")) script.push_back(config_from_request(c));
          pilot = std::make_unique<explore::ScriptedPilot>(std::move(script));
        } else if (kind == "http") {
          std::string url = body.value("pilot_url", std::string());
          if (url.empty() && std::getenv("PANOWORLD_PILOT_URL")) url = std::getenv("PANOWORLD_PILOT_URL");
          if (url.empty()) throw Error(ErrorKind::Usage, "http pilot needs pilot_url or PANOWORLD_PILOT_URL");
          pilot = std::make_unique<explore::HttpPilot>(url);
        } else {
          throw Error(ErrorKind::Usage, "unknown pilot " + kind);
        }
        const explore::GoalOutcome out = explore::run_goal_driven(s.session, goal, *pilot, budget, face_size);
        json j = step_reply(s, 0, body.value("include_view", true));
        j["status"] = out.status == explore::GoalStatus::Stopped ? "stopped" : "budget-exhausted";
        json traj = json::array();
        for (const auto& c : out.trajectory) traj.push_back(explore::to_json(c));
        j["trajectory"] = traj;
        j["responses"] = out.responses;
        return j;
      }));
    });
  });
  http.Post(R"(/sessions/([^/]+)/fork)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const std::string parent = req.matches[1];
      const json body = body_of(req);
      send(res, global_idempotent(req, body, [&] {
        auto stored = store.get(parent);
        std::lock_guard lock(*store.writer_lock(parent));
        const std::string id = store.create(stored->recipe, stored->session.fork(), parent, stored->session.step_count());
        if (auto bound = bound_scenario(parent)) {
          io::write_text(store.session_dir(id) / "scenario.json", json{{"scenario", *bound}}.dump() + "\n");
        }
        return Reply{201, session_summary(*store.get(id))};
      }));
    });
  });
  http.Get(R"(/sessions/([^/]+)/view)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const std::string id = req.matches[1];
      auto stored = store.get(id);
      Panorama view;
      {
        std::lock_guard lock(*store.writer_lock(id));
        view = pick_view(stored->session, req);
      }
      send_view(res, req, view);
    });
  });
  http.Get(R"(/sessions/([^/]+)/bev)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const std::string id = req.matches[1];
      auto stored = store.get(id);
      std::optional<explore::ExplorationSession> copy;
      {
        std::lock_guard lock(*store.writer_lock(id));
        copy = stored->session.fork();
      }
      const Image img = bird_eye_view(*copy, query(req, "height", 30.0), query(req, "face_size", 256));
      send_image(res, img, query(req, "encoding", std::string("png")), scratch());
    });
  });
  http.Get(R"(/sessions/([^/]+)/trajectory)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const std::string id = req.matches[1];
      store.get(id);
      const fs::path file = store.session_dir(id) / "export" / "trajectory.jsonl";
      {
        std::lock_guard lock(*store.writer_lock(id));
        store.export_trajectory(id, file, query(req, "frames", 0) != 0);
      }
      res.set_content(io::read_text(file), "application/x-ndjson");
    });
  });
  http.Get(R"(/sessions/([^/]+)/belief)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const std::string id = req.matches[1];
      auto stored = store.get(id);
      const auto bound = bound_scenario(id);
      if (!bound) throw Error(ErrorKind::Domain, "session " + id + " is not bound to a scenario");
      const eqa::Scenario& s = scenario(*bound);
      const belief::OraclePerception model(s.space);
      std::vector<belief::Observation> observations;
      {
        std::lock_guard lock(*store.writer_lock(id));
        for (const auto& h : stored->session.history()) observations.push_back({h.frames.back(), h.pose_after});
      }
      belief::Belief b = belief::Belief::uniform(s.space->size());
      json trace = json::array({belief::dump(*s.space, b)});
      for (const auto& o : observations) {
        b = belief::physical_update(b, o, model);
        trace.push_back(belief::dump(*s.space, b));
      }
      json marginals = json::array();
      for (std::size_t k = 0; k < s.space->slots().size(); ++k) {
        const auto& slot = s.space->slots()[k];
        json values = json::object();
        for (std::size_t v = 0; v < slot.values.size(); ++v) values[slot.values[v].label] = b.marginal(*s.space, k, static_cast<int>(v));
        marginals.push_back({{"slot", slot.name}, {"values", values}});
      }
      send(res, {200, {{"schema", "panoworld.belief-trace/1"},
                       {"session_id", id},
                       {"scenario", *bound},
                       {"steps", observations.size()},
                       {"trace", trace},
                       {"belief", trace.back()},
                       {"marginals", marginals}}});
    });
  });

  // EQA scenarios and human decisions.
  http.Get("/eqa/scenarios", [this](const Request&, Response& res) {
    guard(res, [&] {
      json list = json::array();
      for (const auto& s : builtin()) {
        json choices = json::array();
        for (const auto& c : s.choices) choices.push_back({{"label", c.label}, {"text", c.text}});
        list.push_back({{"id", s.id}, {"category", s.category}, {"kind", s.kind}, {"context", s.context}, {"choices", choices}});
      }
      send(res, {200, {{"scenarios", list}}});
    });
  });
  http.Get(R"(/eqa/scenarios/([^/]+))", [this](const Request& req, Response& res) {
    guard(res, [&] { send(res, {200, eqa::to_json(scenario(req.matches[1]))}); });
  });
  http.Post("/eqa/records", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const json body = body_of(req);
      const std::string name = body.value("report", std::string("human"));
      std::vector<eqa::Record> added;
      for (const json& j : body.at("records")) {
        const eqa::Scenario& s = scenario(j.at("scenario"));
        eqa::Record r;
        r.scenario = s.id;
        r.category = s.category;
        r.kind = s.kind;
        r.choice = j.at("choice").get<std::string>();
        const int chosen = s.choice_index(r.choice);
        if (chosen < 0) throw Error(ErrorKind::Domain, "unknown choice " + r.choice + " for " + s.id);
        r.distribution.assign(s.choices.size(), 0.0);
        if (j.contains("distribution")) {
          r.distribution = j["distribution"].get<std::vector<double>>();
          if (r.distribution.size() != s.choices.size()) throw Error(ErrorKind::Domain, "distribution size mismatch");
        } else {
          r.distribution[static_cast<std::size_t>(chosen)] = 1.0;
        }
        r.valid = true;
        r.correct = r.choice == s.gold_choice;
        r.gold_confidence = r.distribution[static_cast<std::size_t>(s.choice_index(s.gold_choice))];
        r.rationale = j.value("rationale", std::string());
        added.push_back(std::move(r));
      }
      std::lock_guard lock(report_mutex);
      const fs::path file = options.root / "reports" / (name + ".json");
      if (name.find('/') != std::string::npos || name.empty()) throw Error(ErrorKind::Usage, "bad report name");
      eqa::EqaReport report;
      report.agent = name;
      report.mode = eqa::mode_from_name(body.value("mode", std::string("imagination")));
      if (fs::exists(file)) report.records = eqa::EqaReport::records_from_json(json::parse(io::read_text(file)));
      report.records.insert(report.records.end(), added.begin(), added.end());
      const json doc = report.to_json();
      io::write_text(file, doc.dump(1) + "\n");
      send(res, {200, doc});
    });
  });
  http.Get(R"(/eqa/reports/([^/]+))", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const std::string name = req.matches[1];
      const fs::path file = options.root / "reports" / (name + ".json");
      if (!fs::exists(file)) throw NotFound("no report " + name);
      res.set_content(io::read_text(file), "application/json");
    });
  });

  // Long jobs.
  http.Post("/ielc", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const json body = body_of(req);
      send(res, global_idempotent(req, body, [&] {
        return submit("ielc-run", [body](const ProgressFn& p) { return ielc_request(body, p).to_json(); });
      }));
    });
  });
  http.Post("/eqa", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const json body = body_of(req);
      const std::string agent = body.value("agent", std::string("random"));
      if (agent != "http") eqa::make_agent(agent);  // reject unknown agents before queueing
      send(res, global_idempotent(req, body, [&] {
        return submit("eqa-run", [body](const ProgressFn& p) { return eqa_request(body, p); });
      }));
    });
  });
  http.Post("/datasets", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const json body = body_of(req);
      send(res, global_idempotent(req, body, [&] {
        const fs::path root = options.root / "datasets";
        return submit("dataset-gen", [body, root](const ProgressFn& p) {
          const std::string name = "dataset-" + std::to_string(std::hash<std::string>{}(body.dump()));
          json manifest = dataset_request(body, root / name, p);
          manifest["dir"] = (root / name).string();
          return manifest;
        });
      }));
    });
  });
  http.Get(R"(/jobs/([^/]+))", [this](const Request& req, Response& res) {
    guard(res, [&] { send(res, {200, jobs.get(req.matches[1]).to_json()}); });
  });
  http.Get(R"(/jobs/([^/]+)/result)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const JobRecord r = jobs.get(req.matches[1]);
      if (r.status == JobStatus::Failed) {
        send(res, {409, {{"error", r.error.value_or(json(nullptr))}, {"job", r.to_json()}}});
      } else if (r.status != JobStatus::Succeeded) {
        send(res, {409, error_body("not-finished", "job " + r.id + " is " + std::string(to_string(r.status)))});
      } else {
        send(res, {200, jobs.result(r.id)});
      }
    });
  });
  http.Get(R"(/jobs/([^/]+)/events)", [this](const Request& req, Response& res) {
    guard(res, [&] {
      const std::string id = req.matches[1];
      jobs.get(id);
      res.set_chunked_content_provider("text/event-stream", [this, id, seen = -1](std::size_t, httplib::DataSink& sink) mutable {
        const JobRecord r = jobs.wait_change(id, seen, std::chrono::seconds(1));
        if (r.version != seen) {
          seen = r.version;
          const std::string event = "event: " + std::string(terminal(r.status) ? "done" : "progress") + "\ndata: " +
                                    r.to_json().dump() + "\n\n";
          if (!sink.write(event.data(), event.size())) return false;
        }
        if (terminal(r.status)) sink.done();
        return true;
      });
    });
  });
}

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->http.bind_to_any_port(host) : (impl_->http.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void Server::run() { impl_->http.listen_after_bind(); }

void Server::start() {
  impl_->thread = std::thread([this] { run(); });
  impl_->http.wait_until_ready();
}

void Server::stop() {
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

SessionStore& Server::store() { return impl_->store; }
JobManager& Server::jobs() { return impl_->jobs; }

}  // namespace panoworld::service
