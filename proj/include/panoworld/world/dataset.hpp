#pragma once

#include "panoworld/world/path.hpp"
#include "panoworld/world/render.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>

namespace panoworld::world {

/// Conditioning window used when training on a video: any start frame in
/// [1, 25] (1-based) conditions the 25 frames that follow it.
inline constexpr int kConditionFirstMax = 25;
inline constexpr int kTargetFrames = 25;

struct DatasetOptions {
  int n_paths = 1;
  int width = 1024;
  int height = 512;
  PathOptions path;
  RenderOptions render;
};

/// Receives every rendered frame; frame indices are 0-based.
using FrameSink = std::function<void(int path, int frame, const Pose& pose, const Panorama& view)>;

/// Samples n_paths straight paths and renders every pose. Returns the
/// manifest (schema "panoworld.dataset/1") listing poses per path and the
/// conditioning-window convention.
nlohmann::json generate_dataset(const Scene& scene, const DatasetOptions& options, std::uint64_t seed,
                                const FrameSink& sink);

/// Writes `path_XXX/frame_YYY.png` files plus `manifest.json` under `dir`.
nlohmann::json write_dataset(const Scene& scene, const DatasetOptions& options, std::uint64_t seed,
                             const std::filesystem::path& dir);

}  // namespace panoworld::world
