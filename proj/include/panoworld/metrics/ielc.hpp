#pragma once

#include "panoworld/explore/generator.hpp"
#include "panoworld/explore/loop.hpp"
#include "panoworld/metrics/embedding.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace panoworld::metrics {

using GeneratorFactory = std::function<std::shared_ptr<explore::WorldGenerator>(std::shared_ptr<const world::Scene>)>;

struct IelcOptions {
  int n_loops = 1000;
  explore::LoopBounds bounds;  // defaults: 2..9 rotations, 2..20 m
  std::uint64_t seed = 0;
  int width = 512;
  int height = 256;
  int supersample = 1;  // origin view render; match the generator's setting
  world::SceneParams scene_params;
  int path_attempts = 20;  // paths tried per loop before it counts as filtered
  double clearance = world::kDefaultClearance;
  double min_valid_fraction = 0.95;  // below this the report is partial
  double distance_bin = 5.0;          // grid column width in meters
  Exec exec = Exec::Parallel;         // across loops
  /// Called with (finished, total) after each loop, possibly concurrently.
  std::function<void(int, int)> progress;
};

struct IelcLoop {
  int index = 0;
  std::uint64_t scene_seed = 0;
  bool filtered = false;
  int rotation_count = 0;
  double total_distance = 0.0;
  double latent_mse = 0.0;
  double pixel_mse = 0.0;
  bool identical = false;  // final view equals the origin view bit for bit
};

struct IelcCell {
  int rotations = 0;
  double distance_lo = 0.0;
  double distance_hi = 0.0;
  int count = 0;
  double mean = 0.0;
};

inline constexpr const char* kIelcSchema = "panoworld.ielc/1";

struct IelcReport {
  IelcOptions options;
  nlohmann::json embedding;
  nlohmann::json generator;
  std::vector<IelcLoop> loops;
  int valid = 0;
  int filtered = 0;
  double mean = 0.0;  // arithmetic mean of latent_mse over valid loops
  bool partial = false;
  std::vector<IelcCell> grid;
  double seconds = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
  /// Rotations x distance table of mean latent MSE ("-" for empty cells).
  std::string format_grid() const;
};

/// Loop i uses scene generate_scene(derive_seed(seed, i, 1)), starts at the
/// spawn point with a random heading and samples paths from
/// derive_seed(seed, i) until one is collision-free in that scene. The origin
/// view is the oracle render; the final view comes from a final-only session
/// driven by the factory's generator. Results do not depend on scheduling.
IelcReport run_ielc(const GeneratorFactory& factory, const nlohmann::json& generator_identity,
                    const IelcOptions& options = {}, const Embedding& embedding = default_embedding());

IelcReport run_ielc(const explore::GeneratorSpec& spec, const IelcOptions& options = {},
                    const Embedding& embedding = default_embedding());

IelcOptions ielc_options_from_json(const nlohmann::json& doc);

}  // namespace panoworld::metrics
