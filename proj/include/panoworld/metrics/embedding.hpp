#pragma once

#include "panoworld/common/image.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace panoworld::metrics {

/// Image -> fixed-length vector. Implementations must be deterministic.
/// Reports record name() and version() so scores are only compared within
/// one embedding.
class Embedding {
 public:
  virtual ~Embedding() = default;
  virtual std::vector<double> embed(const Image& image) const = 0;
  virtual std::string name() const = 0;
  virtual std::string version() const = 0;
  virtual std::size_t dimension() const = 0;

  nlohmann::json identity() const;
};

/// Default embedding: area-resize to 64x32, YCbCr with centered chroma, then
/// an 8-bin gradient-orientation histogram of luma per 8x8 block, weighted
/// by gradient magnitude and divided by the block area. Horizontal gradients
/// wrap around the seam.
class PanoEmbedding : public Embedding {
 public:
  static constexpr int kWidth = 64;
  static constexpr int kHeight = 32;
  static constexpr int kBlock = 8;
  static constexpr int kBins = 8;

  std::vector<double> embed(const Image& image) const override;
  std::string name() const override { return "pano-color-hog"; }
  std::string version() const override { return "1"; }
  std::size_t dimension() const override;
};

const Embedding& default_embedding();

/// latent_mse(black, white) under the default embedding: luma differs by 1
/// on every resized pixel, chroma and gradients agree.
inline constexpr double kDefaultEmbeddingBlackWhite = 2048.0 / 6400.0;

/// Box-filter (area) resampling to an arbitrary size.
Image area_resize(const Image& image, int width, int height);

/// Mean squared difference of the two embedding vectors.
double latent_mse(const Image& a, const Image& b, const Embedding& embedding = default_embedding());
double latent_mse(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace panoworld::metrics
