#include "patterns.hpp"

#include "panoworld/geometry/spherical.hpp"

#include <cmath>
#include <random>

namespace panoworld::testing {

Panorama sphere_pattern(int kind, int width, int height) {
  Panorama out(width, height);
  std::mt19937_64 rng(1000 + kind);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> phase(0.0, geo::kTwoPi);
  double a[3][3], p[3];
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < 3; ++k) a[c][k] = coef(rng);
    p[c] = phase(rng);
  }
  const geo::Vec3 blob = geo::to_direction({phase(rng) - geo::kPi, 0.6 * (phase(rng) / geo::kPi - 1.0)});
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const geo::Vec3 d = geo::pixel_center_direction(x, y, width, height);
      float ch[3];
      for (int c = 0; c < 3; ++c) {
        double v = 0.5 + 0.35 * std::sin(a[c][0] * d.x() + a[c][1] * d.y() + a[c][2] * d.z() + p[c]);
        if (kind % 2 == 1) v += 0.15 * std::exp(-(d - blob).squaredNorm() / 0.08) - 0.05;
        ch[c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
      out.at(x, y) = {ch[0], ch[1], ch[2]};
    }
  }
  return out;
}

std::vector<Panorama> pattern_corpus(int width, int height) {
  std::vector<Panorama> out;
  for (int k = 0; k < kPatternKinds; ++k) out.push_back(sphere_pattern(k, width, height));
  return out;
}

Image random_image(std::uint64_t seed, int width, int height) {
  Image out(width, height);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (Rgb& p : out.pixels()) p = {u(rng), u(rng), u(rng)};
  return out;
}

Image planar_pattern(std::uint64_t seed, int width, int height) {
  Image out(width, height);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  struct Blob { double x, y, s, c[3]; };
  std::vector<Blob> blobs(6);
  for (auto& b : blobs) b = {u(rng) * width, u(rng) * height, 2.0 + u(rng) * width / 6.0, {u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5}};
  const double gx = u(rng), gy = u(rng);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double ch[3];
      for (int c = 0; c < 3; ++c) ch[c] = 0.3 + 0.3 * (gx * x / width + gy * y / height);
      for (const auto& b : blobs) {
        const double w = std::exp(-((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (2 * b.s * b.s));
        for (int c = 0; c < 3; ++c) ch[c] += w * b.c[c];
      }
      out.at(x, y) = {static_cast<float>(std::clamp(ch[0], 0.0, 1.0)), static_cast<float>(std::clamp(ch[1], 0.0, 1.0)),
                      static_cast<float>(std::clamp(ch[2], 0.0, 1.0))};
    }
  }
  return out;
}

Image add_noise(const Image& image, double sigma, std::uint64_t seed) {
  Image out = image;
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.0f, static_cast<float>(sigma));
  for (Rgb& p : out.pixels()) p = {clamp01(p.r + n(rng)), clamp01(p.g + n(rng)), clamp01(p.b + n(rng))};
  return out;
}

Image constant_image(int width, int height, Rgb color) { return Image(width, height, color); }

world::Scene empty_scene() {
  world::Scene s;
  s.ground.tile_size = 0.0;
  return s;
}

world::Scene single_box_scene(const geo::Vec3& center, const geo::Vec3& size, Rgb color) {
  world::Scene s = empty_scene();
  world::Primitive p;
  p.kind = world::PrimitiveKind::Box;
  p.center = center;
  p.size = size;
  p.color = color;
  s.primitives.push_back(p);
  return s;
}

}  // namespace panoworld::testing
