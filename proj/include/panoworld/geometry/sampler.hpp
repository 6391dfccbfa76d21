#pragma once

#include "panoworld/common/image.hpp"

namespace panoworld::geo {

/// Interpolation kernel used by every resampler in the module.
enum class Interp { Nearest, Bilinear };

/// Samples an equirectangular image at continuous coordinates (u, v):
/// columns wrap modulo W, rows clamp to [0, H-1] at the poles.
Rgb sample_panorama(const Image& image, double u, double v, Interp interp = Interp::Bilinear);

/// Samples a planar image (cube face, perspective view) with edge clamping
/// on both axes. Same pixel-center convention as sample_panorama.
Rgb sample_planar(const Image& image, double x, double y, Interp interp = Interp::Bilinear);

}  // namespace panoworld::geo
