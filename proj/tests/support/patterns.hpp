#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/world/scene.hpp"

#include <cstdint>
#include <vector>

namespace panoworld::testing {

/// Band-limited panoramas defined as smooth functions of the view direction,
/// so they are continuous across the seam and at the poles.
Panorama sphere_pattern(int kind, int width, int height);
inline constexpr int kPatternKinds = 6;
std::vector<Panorama> pattern_corpus(int width, int height);

/// Uniform random channels in [0, 1].
Image random_image(std::uint64_t seed, int width, int height);

/// Smooth planar test images for metric checks (blobs and ramps).
Image planar_pattern(std::uint64_t seed, int width, int height);

/// Adds clamped Gaussian noise.
Image add_noise(const Image& image, double sigma, std::uint64_t seed);

Image constant_image(int width, int height, Rgb color);

/// Empty world: sky and untextured ground.
world::Scene empty_scene();

/// Scene with a single primitive added to an empty world.
world::Scene single_box_scene(const geo::Vec3& center, const geo::Vec3& size, Rgb color = {0.8f, 0.2f, 0.2f});

}  // namespace panoworld::testing
