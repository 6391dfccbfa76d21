#include "panoworld/geometry/perspective.hpp"

#include "panoworld/common/error.hpp"

#include <cmath>

namespace panoworld::geo {

Image perspective_view(const Panorama& pano, const SphericalCoord& heading, double fov, int out_width,
                       int out_height, Interp interp, Exec exec) {
  if (!(fov > 0.0 && fov < kPi)) {
    throw Error(ErrorKind::Domain, "field of view must lie in (0, pi)");
  }
  const Vec3 forward = to_direction(heading);
  const Vec3 right = to_direction({heading.phi + kHalfPi, 0.0});
  const Vec3 up = right.cross(forward);
  const double half_w = std::tan(0.5 * fov);
  const double half_h = half_w * out_height / out_width;
  Image out(out_width, out_height);
  const int w = pano.width();
  const int h = pano.height();
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < out_height; ++y) {
    auto dst = out.row(y);
    const double b = (2.0 * (y + 0.5) / out_height - 1.0) * half_h;
    for (int x = 0; x < out_width; ++x) {
      const double a = (2.0 * (x + 0.5) / out_width - 1.0) * half_w;
      const PixelCoord p = direction_to_pixel(forward + a * right - b * up, w, h);
      dst[x] = sample_panorama(pano, p.u, p.v, interp);
    }
  }
  return out;
}

}  // namespace panoworld::geo
