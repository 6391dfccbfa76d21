#include "panoworld/geometry/rotation.hpp"

#include "panoworld/common/error.hpp"

#include <cmath>

namespace panoworld::geo {

void RotationSpec::validate() const {
  if (!std::isfinite(delta_phi) || !std::isfinite(delta_theta)) {
    throw Error(ErrorKind::Domain, "rotation angles must be finite");
  }
  if (mode == RotationMode::YawOnly && delta_theta != 0.0) {
    throw Error(ErrorKind::Domain, "yaw-only rotation requires delta_theta = 0");
  }
}

Rotation Rotation::yaw(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 m;
  m << c, 0.0, -s,
       0.0, 1.0, 0.0,
       s, 0.0, c;
  return Rotation(m);
}

Rotation Rotation::pitch(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 m;
  m << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return Rotation(m);
}

Rotation Rotation::from_spec(const RotationSpec& spec) {
  spec.validate();
  return yaw(spec.delta_phi).then(pitch(spec.delta_theta));
}

Rotation Rotation::inverse() const { return Rotation(m_.transpose()); }

Rotation Rotation::then(const Rotation& next) const { return Rotation(next.m_ * m_); }

SphericalCoord rotate_sphere(const SphericalCoord& c, const RotationSpec& spec) {
  spec.validate();
  if (spec.mode == RotationMode::YawOnly) {
    return {wrap_pi(c.phi + spec.delta_phi), c.theta};
  }
  return rotate_sphere(c, Rotation::from_spec(spec));
}

SphericalCoord rotate_sphere(const SphericalCoord& c, const Rotation& rotation) {
  return from_direction(rotation.apply(to_direction(c)));
}

std::optional<int> integer_column_shift(double delta_phi, int width) {
  const double shift = delta_phi * width / kTwoPi;
  const double nearest = std::round(shift);
  if (std::abs(shift - nearest) > 1e-7) return std::nullopt;
  long long s = static_cast<long long>(nearest) % width;
  if (s < 0) s += width;
  return static_cast<int>(s);
}

Panorama roll_columns(const Panorama& pano, int shift) {
  const int w = pano.width();
  int s = shift % w;
  if (s < 0) s += w;
  Panorama out(w, pano.height());
  for (int y = 0; y < pano.height(); ++y) {
    const auto src = pano.row(y);
    auto dst = out.row(y);
    // dst[j] = src[(j - s) mod w]
    std::copy(src.begin() + (w - s), src.end(), dst.begin());
    std::copy(src.begin(), src.begin() + (w - s), dst.begin() + s);
  }
  return out;
}

namespace {

Panorama yaw_interpolate(const Panorama& pano, double delta_phi, Interp interp, Exec exec) {
  const int w = pano.width();
  const int h = pano.height();
  const double shift = delta_phi * w / kTwoPi;
  const double base = std::floor(shift);
  const double frac = shift - base;  // in [0, 1)
  long long s = static_cast<long long>(base) % w;
  if (s < 0) s += w;
  if (interp == Interp::Nearest) {
    // round-half-down of the source position keeps the result a pure roll
    return roll_columns(pano, static_cast<int>(frac <= 0.5 ? s : s + 1));
  }
  // out[j] = frac * in[j - s - 1] + (1 - frac) * in[j - s]
  const auto f = static_cast<float>(frac);
  const float g = 1.0f - f;
  Panorama out(w, h);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < h; ++y) {
    const auto src = pano.row(y);
    auto dst = out.row(y);
    for (int j = 0; j < w; ++j) {
      long long a = (j - s) % w;
      if (a < 0) a += w;
      const long long b = a == 0 ? w - 1 : a - 1;
      const Rgb& p = src[a];
      const Rgb& q = src[b];
      dst[j] = {g * p.r + f * q.r, g * p.g + f * q.g, g * p.b + f * q.b};
    }
  }
  return out;
}

}  // namespace

Panorama rotate_panorama(const Panorama& pano, const RotationSpec& spec, Interp interp, Exec exec) {
  spec.validate();
  if (spec.delta_theta == 0.0) {
    if (auto shift = integer_column_shift(spec.delta_phi, pano.width())) {
      return roll_columns(pano, *shift);
    }
    return yaw_interpolate(pano, spec.delta_phi, interp, exec);
  }
  return rotate_panorama(pano, Rotation::from_spec(spec), interp, exec);
}

Panorama rotate_panorama(const Panorama& pano, const Rotation& rotation, Interp interp, Exec exec) {
  const int w = pano.width();
  const int h = pano.height();
  const Mat3 inv = rotation.inverse().matrix();
  Panorama out(w, h);
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < h; ++y) {
    auto dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const Vec3 src_dir = inv * pixel_center_direction(x, y, w, h);
      const PixelCoord p = direction_to_pixel(src_dir, w, h);
      dst[x] = sample_panorama(pano, p.u, p.v, interp);
    }
  }
  return out;
}

}  // namespace panoworld::geo
