#include "panoworld/world/dataset.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"

#include <cstdio>
#include <random>

namespace panoworld::world {

using nlohmann::json;

json generate_dataset(const Scene& scene, const DatasetOptions& options, std::uint64_t seed, const FrameSink& sink) {
  if (options.n_paths < 0) throw Error(ErrorKind::Domain, "n_paths must be non-negative");
  std::mt19937_64 rng(seed);
  json paths = json::array();
  for (int p = 0; p < options.n_paths; ++p) {
    const PathSample path = sample_straight_path(scene, rng, options.path);
    json poses = json::array();
    for (int k = 0; k < path.frame_count; ++k) {
      const Pose& pose = path.poses[static_cast<std::size_t>(k)];
      const Panorama view = render_panorama(scene, pose, options.width, options.height, options.render);
      if (sink) sink(p, k, pose, view);
      poses.push_back(to_json(pose));
    }
    paths.push_back({{"index", p},
                     {"length_m", path.length},
                     {"frame_count", path.frame_count},
                     {"spacing_m", path.spacing()},
                     {"poses", std::move(poses)}});
  }
  return {{"schema", "panoworld.dataset/1"},
          {"scene_seed", scene.seed},
          {"seed", seed},
          {"width", options.width},
          {"height", options.height},
          {"conditioning", {{"first_frame_min", 1}, {"first_frame_max", kConditionFirstMax}, {"target_frames", kTargetFrames}}},
          {"units", {{"position", "m"}, {"yaw", "rad"}}},
          {"paths", std::move(paths)}};
}

json write_dataset(const Scene& scene, const DatasetOptions& options, std::uint64_t seed,
                   const std::filesystem::path& dir) {
  json manifest = generate_dataset(scene, options, seed, [&](int path, int frame, const Pose&, const Panorama& view) {
    char name[64];
    std::snprintf(name, sizeof(name), "path_%03d/frame_%03d.png", path, frame);
    io::write_png(dir / name, view);
  });
  for (auto& p : manifest["paths"]) {
    char name[32];
    std::snprintf(name, sizeof(name), "path_%03d", p["index"].get<int>());
    p["frames_dir"] = name;
  }
  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace panoworld::world
