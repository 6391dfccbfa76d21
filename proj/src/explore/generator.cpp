#include "panoworld/explore/generator.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/rng.hpp"
#include "panoworld/explore/external_generator.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace panoworld::explore {

using nlohmann::json;

OracleGenerator::OracleGenerator(std::shared_ptr<const world::Scene> scene, world::RenderOptions options)
    : scene_(std::move(scene)), options_(options) {
  if (!scene_) throw Error(ErrorKind::Domain, "oracle generator needs a scene");
}

Panorama OracleGenerator::render(const Pose& pose, int width, int height) const {
  return world::render_panorama(*scene_, pose, width, height, options_);
}

std::vector<Panorama> OracleGenerator::generate(const GenerationRequest& request) {
  const int n = request.config.frame_count;
  const int w = request.view.width();
  const int h = request.view.height();
  std::vector<Panorama> frames;
  const int first = request.final_only ? n : 1;
  frames.reserve(static_cast<std::size_t>(n - first + 1));
  for (int k = first; k <= n; ++k) {
    // k == n gives fraction exactly 1.0, matching the dead-reckoned pose.
    const double fraction = static_cast<double>(k) / n;
    Pose p = request.pose;
    p = advance(p, {0.0, request.config.distance, n, request.config.climb}, fraction);
    frames.push_back(render(p, w, h));
  }
  return frames;
}

json OracleGenerator::describe() const {
  return GeneratorSpec{"oracle", 0.0, options_.supersample, {}, 0}.to_json();
}

NoisyOracleGenerator::NoisyOracleGenerator(std::shared_ptr<const world::Scene> scene, double sigma,
                                           world::RenderOptions options)
    : OracleGenerator(std::move(scene), options), sigma_(sigma) {
  if (!(sigma >= 0.0)) throw Error(ErrorKind::Domain, "noise sigma must be non-negative");
}

void add_hashed_noise(Panorama& image, double sigma, std::uint64_t seed) {
  if (sigma == 0.0) return;
  auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    float* ch[3] = {&px[i].r, &px[i].g, &px[i].b};
    for (int c = 0; c < 3; ++c) {
      const std::uint64_t key = derive_seed(seed, 3 * i + static_cast<std::size_t>(c));
      // Box-Muller from two independent uniforms; u1 in (0, 1].
      const double u1 = 1.0 - unit_from_bits(key);
      const double u2 = unit_from_bits(mix64(key));
      const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(geo::kTwoPi * u2);
      *ch[c] = quantize8(static_cast<float>(*ch[c] + sigma * z));
    }
  }
}

std::vector<Panorama> NoisyOracleGenerator::generate(const GenerationRequest& request) {
  std::vector<Panorama> frames = OracleGenerator::generate(request);
  const int n = request.config.frame_count;
  const int first = n - static_cast<int>(frames.size()) + 1;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    add_hashed_noise(frames[i], sigma_, derive_seed(request.seed, static_cast<std::uint64_t>(first) + i));
  }
  return frames;
}

json NoisyOracleGenerator::describe() const {
  return GeneratorSpec{"noisy-oracle", sigma_, options_.supersample, {}, 0}.to_json();
}

GeneratorSpec GeneratorSpec::from_json(const json& doc) {
  try {
    GeneratorSpec s;
    s.kind = doc.value("kind", std::string("oracle"));
    s.sigma = doc.value("sigma", 0.0);
    s.supersample = doc.value("supersample", 1);
    s.command = doc.value("command", std::vector<std::string>{});
    s.latency_ms = doc.value("latency_ms", 0);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Protocol, std::string("malformed generator spec: ") + e.what());
  }
}

json GeneratorSpec::to_json() const {
  json j = {{"kind", kind}};
  if (kind == "noisy-oracle") j["sigma"] = sigma;
  if (kind != "external") j["supersample"] = supersample;
  if (!command.empty()) j["command"] = command;
  if (latency_ms > 0) j["latency_ms"] = latency_ms;
  return j;
}

namespace {

// Wraps another generator with a fixed sleep per call.
class DelayedGenerator : public WorldGenerator {
 public:
  DelayedGenerator(std::shared_ptr<WorldGenerator> inner, GeneratorSpec spec) : inner_(std::move(inner)), spec_(std::move(spec)) {}
  std::vector<Panorama> generate(const GenerationRequest& request) override {
    std::this_thread::sleep_for(std::chrono::milliseconds(spec_.latency_ms));
    return inner_->generate(request);
  }
  std::string name() const override { return inner_->name(); }
  json describe() const override { return spec_.to_json(); }
  bool exclusive() const override { return inner_->exclusive(); }

 private:
  std::shared_ptr<WorldGenerator> inner_;
  GeneratorSpec spec_;
};

}  // namespace

std::shared_ptr<WorldGenerator> make_generator(const GeneratorSpec& spec, std::shared_ptr<const world::Scene> scene) {
  world::RenderOptions ro;
  ro.supersample = spec.supersample;
  std::shared_ptr<WorldGenerator> gen;
  if (spec.kind == "oracle") {
    gen = std::make_shared<OracleGenerator>(std::move(scene), ro);
  } else if (spec.kind == "noisy-oracle") {
    gen = std::make_shared<NoisyOracleGenerator>(std::move(scene), spec.sigma, ro);
  } else if (spec.kind == "external") {
    gen = std::make_shared<ExternalGenerator>(spec.command);
  } else {
    throw Error(ErrorKind::Domain, "unknown generator kind: " + spec.kind);
  }
  if (spec.latency_ms > 0) gen = std::make_shared<DelayedGenerator>(gen, spec);
  return gen;
}

}  // namespace panoworld::explore
