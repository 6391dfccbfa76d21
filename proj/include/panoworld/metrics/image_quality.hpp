#pragma once

#include "panoworld/common/image.hpp"

#include <limits>

namespace panoworld::metrics {

/// PSNR of identical images. Serialized as the string "inf".
inline constexpr double kPsnrInfinite = std::numeric_limits<double>::infinity();

/// Mean squared error over all pixels and channels.
/// Throws ErrorKind::DimensionMismatch when sizes differ.
double mse(const Image& a, const Image& b, Exec exec = Exec::Parallel);

/// 10 log10(1 / MSE) in dB for a dynamic range of 1.0.
double psnr(const Image& a, const Image& b, Exec exec = Exec::Parallel);

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

/// Gaussian-window SSIM averaged over the valid (fully covered) region and
/// over the three channels. Needs both sides >= window.
double ssim(const Image& a, const Image& b, const SsimOptions& options = {}, Exec exec = Exec::Parallel);

}  // namespace panoworld::metrics
