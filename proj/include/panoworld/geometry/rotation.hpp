#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/geometry/sampler.hpp"
#include "panoworld/geometry/spherical.hpp"

#include <optional>

namespace panoworld::geo {

enum class RotationMode { YawOnly, Full3d };

/// A view rotation. Yaw-only mode is the literal longitude shift used for
/// navigation; full-3d mode composes a yaw then a pitch on unit vectors.
struct RotationSpec {
  double delta_phi = 0.0;
  double delta_theta = 0.0;
  RotationMode mode = RotationMode::YawOnly;

  /// Throws ErrorKind::Domain when yaw-only carries a non-zero delta_theta.
  void validate() const;
};

/// Proper rotation of the camera frame (orthonormal, det = +1).
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Maps direction(phi, theta) to direction(phi + angle, theta).
  static Rotation yaw(double angle);
  /// Maps direction(0, theta) to direction(0, theta + angle).
  static Rotation pitch(double angle);
  /// Yaw by delta_phi, then pitch by delta_theta.
  static Rotation from_spec(const RotationSpec& spec);

  Rotation inverse() const;
  /// Applies *this first, then `next`.
  Rotation then(const Rotation& next) const;
  Vec3 apply(const Vec3& v) const { return m_ * v; }
  const Mat3& matrix() const { return m_; }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

SphericalCoord rotate_sphere(const SphericalCoord& c, const RotationSpec& spec);
SphericalCoord rotate_sphere(const SphericalCoord& c, const Rotation& rotation);

/// Column shift (in pixels) equivalent to a yaw of delta_phi, when it is an
/// integer within 1e-7 px; nullopt otherwise. Result is reduced modulo W.
std::optional<int> integer_column_shift(double delta_phi, int width);

/// Lossless horizontal roll: output column j takes input column (j - shift) mod W.
Panorama roll_columns(const Panorama& pano, int shift);

/// Output pixel (u, v) is sampled from the input at the inverse-rotated
/// position. With delta_theta = 0 the operation is a pure longitude shift:
/// a lossless roll for integer-pixel shifts, otherwise a horizontal
/// interpolation whose weights are identical for every column.
Panorama rotate_panorama(const Panorama& pano, const RotationSpec& spec,
                         Interp interp = Interp::Bilinear, Exec exec = Exec::Parallel);

/// General rotation (e.g. the inverse of a full-3d spec).
Panorama rotate_panorama(const Panorama& pano, const Rotation& rotation,
                         Interp interp = Interp::Bilinear, Exec exec = Exec::Parallel);

}  // namespace panoworld::geo
