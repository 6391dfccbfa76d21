#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/geometry/sampler.hpp"
#include "panoworld/geometry/spherical.hpp"

namespace panoworld::geo {

/// Gnomonic view of the panorama centered on `heading`. `fov` is the
/// horizontal field of view in radians, 0 < fov < pi; the image right axis
/// stays horizontal.
Image perspective_view(const Panorama& pano, const SphericalCoord& heading, double fov, int out_width,
                       int out_height, Interp interp = Interp::Bilinear, Exec exec = Exec::Parallel);

}  // namespace panoworld::geo
