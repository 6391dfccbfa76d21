#include "panoworld/geometry/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace panoworld::geo {

namespace {

inline int wrap_index(long long i, int n) {
  long long r = i % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

inline Rgb lerp4(const Rgb& p00, const Rgb& p10, const Rgb& p01, const Rgb& p11, float fx, float fy) {
  const float w00 = (1.0f - fx) * (1.0f - fy);
  const float w10 = fx * (1.0f - fy);
  const float w01 = (1.0f - fx) * fy;
  const float w11 = fx * fy;
  return {p00.r * w00 + p10.r * w10 + p01.r * w01 + p11.r * w11,
          p00.g * w00 + p10.g * w10 + p01.g * w01 + p11.g * w11,
          p00.b * w00 + p10.b * w10 + p01.b * w01 + p11.b * w11};
}

}  // namespace

Rgb sample_panorama(const Image& image, double u, double v, Interp interp) {
  const int w = image.width();
  const int h = image.height();
  if (interp == Interp::Nearest) {
    const int x = wrap_index(static_cast<long long>(std::floor(u)), w);
    const int y = std::clamp(static_cast<int>(std::floor(v)), 0, h - 1);
    return image.at(x, y);
  }
  const double x = u - 0.5;
  const double y = std::clamp(v - 0.5, 0.0, static_cast<double>(h - 1));
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const int x0 = wrap_index(static_cast<long long>(fx0), w);
  const int x1 = x0 + 1 == w ? 0 : x0 + 1;
  const int y0 = static_cast<int>(fy0);
  const int y1 = std::min(y0 + 1, h - 1);
  return lerp4(image.at(x0, y0), image.at(x1, y0), image.at(x0, y1), image.at(x1, y1),
               static_cast<float>(x - fx0), static_cast<float>(y - fy0));
}

Rgb sample_planar(const Image& image, double x, double y, Interp interp) {
  const int w = image.width();
  const int h = image.height();
  if (interp == Interp::Nearest) {
    return image.at(std::clamp(static_cast<int>(std::floor(x)), 0, w - 1),
                    std::clamp(static_cast<int>(std::floor(y)), 0, h - 1));
  }
  const double cx = std::clamp(x - 0.5, 0.0, static_cast<double>(w - 1));
  const double cy = std::clamp(y - 0.5, 0.0, static_cast<double>(h - 1));
  const double fx0 = std::floor(cx);
  const double fy0 = std::floor(cy);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  return lerp4(image.at(x0, y0), image.at(x1, y0), image.at(x0, y1), image.at(x1, y1),
               static_cast<float>(cx - fx0), static_cast<float>(cy - fy0));
}

}  // namespace panoworld::geo
