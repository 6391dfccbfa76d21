#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/geometry/rotation.hpp"
#include "panoworld/metrics/embedding.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace panoworld::metrics {

/// Haar-uniform random rotation, built as yaw * pitch * yaw with the pitch
/// cosine drawn uniformly.
geo::Rotation random_rotation(std::mt19937_64& rng);

struct SclOptions {
  int n_rotations = 16;
  std::uint64_t seed = 0;
  geo::Interp interp = geo::Interp::Bilinear;
};

/// Rotational consistency of a generated panorama video against ground
/// truth: for each random rotation r, the mean over frames of
/// latent_mse(r(gen), r(gt)); rotations are weighted equally.
double scl_consistency(const std::vector<Panorama>& generated, const std::vector<Panorama>& truth,
                       const SclOptions& options = {}, const Embedding& embedding = default_embedding());

/// Mean |column W-1 - column 0| over rows and channels, divided by the mean
/// absolute difference between adjacent interior columns. 0/0 is 1.0.
double seam_continuity(const Panorama& pano);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace panoworld::metrics
