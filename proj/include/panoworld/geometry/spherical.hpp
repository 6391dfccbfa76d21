#pragma once

#include <Eigen/Dense>

#include <numbers>

namespace panoworld::geo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

/// Longitude phi in [-pi, pi), latitude theta in [-pi/2, pi/2]. Unit radius.
struct SphericalCoord {
  double phi = 0.0;
  double theta = 0.0;
};

/// Continuous image-plane position. Integer pixel (i, j) has its center at
/// (i + 0.5, j + 0.5); u wraps modulo W.
struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// Wraps an angle into [-pi, pi).
double wrap_pi(double angle);

bool in_range(const SphericalCoord& c);

/// Forward equirectangular map: ((W / 2pi)(phi + pi), (H / pi)(pi/2 - theta)).
/// Throws ErrorKind::Domain for out-of-range coordinates or non-positive sizes.
PixelCoord sphere_to_pixel(const SphericalCoord& c, int width, int height);

/// Inverse map: (2 pi u / W - pi, pi/2 - pi v / H).
/// Requires 0 <= u < W and 0 <= v <= H.
SphericalCoord pixel_to_sphere(const PixelCoord& p, int width, int height);

/// Camera-frame axes shared by every projection in the library:
///   +X forward (phi = 0, theta = 0), +Y up, +Z right (phi = +pi/2).
/// direction = (cos(theta) cos(phi), sin(theta), cos(theta) sin(phi)).
Vec3 to_direction(const SphericalCoord& c);

/// Inverse of to_direction for any non-zero vector; result satisfies the
/// SphericalCoord range invariants (phi = pi folds to -pi).
SphericalCoord from_direction(const Vec3& d);

/// Unchecked fast paths for the kernels: pixel center -> direction, and
/// direction -> continuous pixel coordinate.
Vec3 pixel_center_direction(int col, int row, int width, int height);
PixelCoord direction_to_pixel(const Vec3& d, int width, int height);

}  // namespace panoworld::geo
