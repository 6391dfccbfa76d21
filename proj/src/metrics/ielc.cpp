#include "panoworld/metrics/ielc.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/rng.hpp"
#include "panoworld/metrics/image_quality.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

namespace panoworld::metrics {

namespace {

std::optional<std::string> run_one(const GeneratorFactory& factory, const IelcOptions& opt, const Embedding& embedding,
                                   int index, IelcLoop& out) {
  try {
    out.index = index;
    out.scene_seed = derive_seed(opt.seed, static_cast<std::uint64_t>(index), 1);
    auto scene = std::make_shared<const world::Scene>(world::generate_scene(out.scene_seed, opt.scene_params));
    std::mt19937_64 rng(derive_seed(opt.seed, static_cast<std::uint64_t>(index)));
    std::uniform_real_distribution<double> heading(-geo::kPi, geo::kPi);
    const world::Pose origin = world::eye_pose(*scene, 0.0, 0.0, heading(rng));

    std::optional<explore::LoopPath> path;
    for (int a = 0; a < opt.path_attempts && !path; ++a) {
      explore::LoopPath candidate = explore::sample_loop_path(rng, opt.bounds);
      if (!explore::loop_blocked(*scene, origin, candidate, opt.clearance)) path = std::move(candidate);
    }
    if (!path) {
      out.filtered = true;
      return std::nullopt;
    }
    out.rotation_count = path->rotation_count;
    out.total_distance = path->total_distance;

    auto generator = factory(scene);
    const explore::OracleGenerator oracle(scene, {opt.supersample, Exec::Serial});
    const Panorama origin_view = oracle.render(origin, opt.width, opt.height);
    const explore::SessionOptions session_opts{explore::HistoryRetention::LastFrame, true,
                                               derive_seed(opt.seed, static_cast<std::uint64_t>(index), 2)};
    const explore::LoopResult r = explore::execute_loop(
        [&] { return explore::ExplorationSession(generator, origin_view, origin, session_opts); }, *path);
    out.latent_mse = latent_mse(r.origin_view, r.final_view, embedding);
    out.pixel_mse = mse(r.origin_view, r.final_view, Exec::Serial);
    out.identical = r.origin_view == r.final_view;
    return std::nullopt;
  } catch (const std::exception& e) {
    return "loop " + std::to_string(index) + ": " + e.what();
  }
}

}  // namespace

IelcReport run_ielc(const GeneratorFactory& factory, const nlohmann::json& generator_identity,
                    const IelcOptions& opt, const Embedding& embedding) {
  if (opt.n_loops < 1) throw Error(ErrorKind::Domain, "n_loops must be positive");
  if (opt.width < 2 || opt.height < 1) throw Error(ErrorKind::Domain, "bad view size");
  if (!(opt.distance_bin > 0.0)) throw Error(ErrorKind::Domain, "distance_bin must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  IelcReport report;
  report.options = opt;
  report.embedding = embedding.identity();
  report.generator = generator_identity;
  report.loops.resize(static_cast<std::size_t>(opt.n_loops));
  std::vector<std::optional<std::string>> errors(report.loops.size());

  std::atomic<int> finished{0};
#pragma omp parallel for schedule(dynamic) if (opt.exec == Exec::Parallel)
  for (int i = 0; i < opt.n_loops; ++i) {
    errors[static_cast<std::size_t>(i)] = run_one(factory, opt, embedding, i, report.loops[static_cast<std::size_t>(i)]);
    if (opt.progress) opt.progress(++finished, opt.n_loops);
  }
  for (const auto& e : errors) {
    if (e) throw Error(ErrorKind::Generator, *e);
  }

  double sum = 0.0;
  for (const IelcLoop& l : report.loops) {
    if (l.filtered) {
      ++report.filtered;
    } else {
      ++report.valid;
      sum += l.latent_mse;
    }
  }
  report.mean = report.valid > 0 ? sum / report.valid : std::numeric_limits<double>::quiet_NaN();
  report.partial = report.valid < opt.min_valid_fraction * opt.n_loops;

  const int columns = static_cast<int>(std::ceil(opt.bounds.max_distance / opt.distance_bin));
  for (int k = opt.bounds.min_rotations; k <= opt.bounds.max_rotations; ++k) {
    for (int c = 0; c < columns; ++c) {
      IelcCell cell{k, c * opt.distance_bin, (c + 1) * opt.distance_bin, 0, 0.0};
      for (const IelcLoop& l : report.loops) {
        if (l.filtered || l.rotation_count != k) continue;
        const int col = std::min(columns - 1, static_cast<int>(l.total_distance / opt.distance_bin));
        if (col != c) continue;
        ++cell.count;
        cell.mean += l.latent_mse;
      }
      if (cell.count > 0) cell.mean /= cell.count;
      report.grid.push_back(cell);
    }
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

IelcReport run_ielc(const explore::GeneratorSpec& spec, const IelcOptions& options, const Embedding& embedding) {
  GeneratorFactory factory = [spec](std::shared_ptr<const world::Scene> scene) {
    return explore::make_generator(spec, std::move(scene));
  };
  IelcOptions opt = options;
  opt.supersample = spec.supersample;
  return run_ielc(factory, spec.to_json(), opt, embedding);
}

nlohmann::json IelcReport::to_json() const {
  nlohmann::json loops_json = nlohmann::json::array();
  for (const IelcLoop& l : loops) {
    nlohmann::json j = {{"index", l.index}, {"scene_seed", l.scene_seed}, {"filtered", l.filtered}};
    if (!l.filtered) {
      j["rotation_count"] = l.rotation_count;
      j["total_distance"] = l.total_distance;
      j["latent_mse"] = l.latent_mse;
      j["pixel_mse"] = l.pixel_mse;
      j["identical"] = l.identical;
    }
    loops_json.push_back(j);
  }
  nlohmann::json grid_json = nlohmann::json::array();
  for (const IelcCell& c : grid) {
    grid_json.push_back({{"rotations", c.rotations},
                         {"distance_lo", c.distance_lo},
                         {"distance_hi", c.distance_hi},
                         {"count", c.count},
                         {"mean", c.count > 0 ? nlohmann::json(c.mean) : nlohmann::json(nullptr)}});
  }
  return {{"schema", kIelcSchema},
          {"embedding", embedding},
          {"generator", generator},
          {"options",
           {{"n_loops", options.n_loops},
            {"seed", options.seed},
            {"width", options.width},
            {"height", options.height},
            {"min_rotations", options.bounds.min_rotations},
            {"max_rotations", options.bounds.max_rotations},
            {"min_distance", options.bounds.min_distance},
            {"max_distance", options.bounds.max_distance},
            {"clearance", options.clearance},
            {"path_attempts", options.path_attempts}}},
          {"valid", valid},
          {"filtered", filtered},
          {"mean", valid > 0 ? nlohmann::json(mean) : nlohmann::json(nullptr)},
          {"partial", partial},
          {"seconds", seconds},
          {"absent_metrics", {"FVD", "LPIPS"}},
          {"grid", grid_json},
          {"loops", loops_json}};
}

std::string IelcReport::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "index,scene_seed,filtered,rotation_count,total_distance,latent_mse,pixel_mse,identical\n";
  for (const IelcLoop& l : loops) {
    out << l.index << ',' << l.scene_seed << ',' << (l.filtered ? 1 : 0) << ',';
    if (l.filtered) {
      out << ",,,,\n";
    } else {
      out << l.rotation_count << ',' << l.total_distance << ',' << l.latent_mse << ',' << l.pixel_mse << ','
          << (l.identical ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string IelcReport::format_grid() const {
  std::ostringstream out;
  const int columns = static_cast<int>(std::ceil(options.bounds.max_distance / options.distance_bin));
  out << "rotations";
  for (int c = 0; c < columns; ++c) {
    std::ostringstream head;
    head << c * options.distance_bin << "-" << (c + 1) * options.distance_bin << "m";
    out << std::setw(12) << head.str();
  }
  out << '\n';
  for (std::size_t i = 0; i < grid.size(); i += static_cast<std::size_t>(columns)) {
    out << std::setw(9) << grid[i].rotations;
    for (int c = 0; c < columns; ++c) {
      const IelcCell& cell = grid[i + static_cast<std::size_t>(c)];
      std::ostringstream v;
      if (cell.count > 0) {
        v << std::scientific << std::setprecision(2) << cell.mean;
      } else {
        v << "-";
      }
      out << std::setw(12) << v.str();
    }
    out << '\n';
  }
  out << "mean " << std::scientific << std::setprecision(3) << mean << " over " << valid << " loops (" << filtered
      << " filtered" << (partial ? ", partial" : "") << ")\n";
  return out.str();
}

IelcOptions ielc_options_from_json(const nlohmann::json& doc) {
  IelcOptions o;
  o.n_loops = doc.value("n_loops", o.n_loops);
  o.seed = doc.value("seed", o.seed);
  o.width = doc.value("width", o.width);
  o.height = doc.value("height", o.height);
  o.bounds.min_rotations = doc.value("min_rotations", o.bounds.min_rotations);
  o.bounds.max_rotations = doc.value("max_rotations", o.bounds.max_rotations);
  o.bounds.min_distance = doc.value("min_distance", o.bounds.min_distance);
  o.bounds.max_distance = doc.value("max_distance", o.bounds.max_distance);
  o.clearance = doc.value("clearance", o.clearance);
  o.path_attempts = doc.value("path_attempts", o.path_attempts);
  o.distance_bin = doc.value("distance_bin", o.distance_bin);
  return o;
}

}  // namespace panoworld::metrics
