#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/explore/config.hpp"
#include "panoworld/world/render.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace panoworld::explore {

/// Everything a world generator is given for one step. `view` is the current
/// panorama after the orientation update; `pose` is the imagined pose after
/// the same update, before any forward motion.
struct GenerationRequest {
  const Panorama& view;
  Pose pose;
  ExplorationConfig config;
  int step_index = 0;
  std::uint64_t seed = 0;
  /// The caller keeps only the last frame; generators may then return just it.
  bool final_only = false;
};

/// Produces forward-motion panoramas. Returns config.frame_count frames, or a
/// single final frame when request.final_only is set. Frames must share the
/// input's dimensions.
class WorldGenerator {
 public:
  virtual ~WorldGenerator() = default;
  virtual std::vector<Panorama> generate(const GenerationRequest& request) = 0;
  virtual std::string name() const = 0;
  /// Description sufficient to rebuild an equivalent generator.
  virtual nlohmann::json describe() const = 0;
  /// True when calls must be serialized across sessions.
  virtual bool exclusive() const { return false; }
};

/// Exact world model: frame k of n is the ground-truth render at fraction k/n
/// of the leg, so the last frame is the render at the dead-reckoned end pose.
class OracleGenerator : public WorldGenerator {
 public:
  OracleGenerator(std::shared_ptr<const world::Scene> scene, world::RenderOptions options = {});

  std::vector<Panorama> generate(const GenerationRequest& request) override;
  std::string name() const override { return "oracle"; }
  nlohmann::json describe() const override;

  const world::Scene& scene() const { return *scene_; }
  std::shared_ptr<const world::Scene> scene_ptr() const { return scene_; }
  /// Render used for origin views, at the generator's settings.
  Panorama render(const Pose& pose, int width, int height) const;

 protected:
  std::shared_ptr<const world::Scene> scene_;
  world::RenderOptions options_;
};

/// Oracle frames plus i.i.d. Gaussian pixel noise of standard deviation
/// sigma, clamped to [0, 1] and snapped to the 8-bit grid. The noise is a
/// pure function of (request seed, frame index, pixel, channel).
class NoisyOracleGenerator : public OracleGenerator {
 public:
  NoisyOracleGenerator(std::shared_ptr<const world::Scene> scene, double sigma, world::RenderOptions options = {});

  std::vector<Panorama> generate(const GenerationRequest& request) override;
  std::string name() const override { return "noisy-oracle"; }
  nlohmann::json describe() const override;
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

/// Adds the deterministic noise field used by NoisyOracleGenerator.
void add_hashed_noise(Panorama& image, double sigma, std::uint64_t seed);

struct GeneratorSpec {
  std::string kind = "oracle";  // oracle | noisy-oracle | external
  double sigma = 0.0;
  int supersample = 1;
  std::vector<std::string> command;  // external generator argv
  int latency_ms = 0;                // artificial delay per step, for service tests

  static GeneratorSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
};

/// Builds a generator from its spec. Oracle kinds require `scene`.
std::shared_ptr<WorldGenerator> make_generator(const GeneratorSpec& spec, std::shared_ptr<const world::Scene> scene);

}  // namespace panoworld::explore
