#include "panoworld/geometry/spherical.hpp"

#include "panoworld/common/error.hpp"

#include <cmath>
#include <string>

namespace panoworld::geo {

double wrap_pi(double angle) {
  if (angle >= -kPi && angle < kPi) return angle;
  double w = std::fmod(angle + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  w -= kPi;
  // fmod can land exactly on +pi after the shift back.
  if (w >= kPi) w -= kTwoPi;
  if (w < -kPi) w = -kPi;
  return w;
}

bool in_range(const SphericalCoord& c) {
  return c.phi >= -kPi && c.phi < kPi && c.theta >= -kHalfPi && c.theta <= kHalfPi;
}

namespace {

void check_size(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::Domain, "panorama size must be positive, got " +
                                       std::to_string(width) + "x" + std::to_string(height));
  }
}

}  // namespace

PixelCoord sphere_to_pixel(const SphericalCoord& c, int width, int height) {
  check_size(width, height);
  if (!in_range(c) || !std::isfinite(c.phi) || !std::isfinite(c.theta)) {
    throw Error(ErrorKind::Domain, "spherical coordinate out of range: phi=" +
                                       std::to_string(c.phi) + " theta=" + std::to_string(c.theta));
  }
  PixelCoord p{width / kTwoPi * (c.phi + kPi), height / kPi * (kHalfPi - c.theta)};
  // phi just below pi can round up to u == W.
  if (p.u >= width) p.u = std::nextafter(static_cast<double>(width), 0.0);
  if (p.v > height) p.v = height;
  if (p.v < 0.0) p.v = 0.0;
  return p;
}

SphericalCoord pixel_to_sphere(const PixelCoord& p, int width, int height) {
  check_size(width, height);
  if (!(p.u >= 0.0 && p.u < width && p.v >= 0.0 && p.v <= height)) {
    throw Error(ErrorKind::Domain, "pixel coordinate out of range: u=" + std::to_string(p.u) +
                                       " v=" + std::to_string(p.v));
  }
  SphericalCoord c{kTwoPi * p.u / width - kPi, kHalfPi - kPi * p.v / height};
  if (c.phi >= kPi) c.phi = -kPi;
  if (c.theta < -kHalfPi) c.theta = -kHalfPi;
  if (c.theta > kHalfPi) c.theta = kHalfPi;
  return c;
}

Vec3 to_direction(const SphericalCoord& c) {
  const double ct = std::cos(c.theta);
  return {ct * std::cos(c.phi), std::sin(c.theta), ct * std::sin(c.phi)};
}

SphericalCoord from_direction(const Vec3& d) {
  const double horizontal = std::hypot(d.x(), d.z());
  SphericalCoord c{std::atan2(d.z(), d.x()), std::atan2(d.y(), horizontal)};
  if (c.phi >= kPi) c.phi = -kPi;
  return c;
}

Vec3 pixel_center_direction(int col, int row, int width, int height) {
  const double phi = kTwoPi * (col + 0.5) / width - kPi;
  const double theta = kHalfPi - kPi * (row + 0.5) / height;
  return to_direction({phi, theta});
}

PixelCoord direction_to_pixel(const Vec3& d, int width, int height) {
  const double phi = std::atan2(d.z(), d.x());
  const double theta = std::atan2(d.y(), std::hypot(d.x(), d.z()));
  double u = width / kTwoPi * (phi + kPi);
  if (u >= width) u -= width;
  return {u, height / kPi * (kHalfPi - theta)};
}

}  // namespace panoworld::geo
