#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/geometry/sampler.hpp"
#include "panoworld/geometry/spherical.hpp"

#include <array>
#include <optional>
#include <string_view>

namespace panoworld::geo {

enum class Face { Front = 0, Back, Left, Right, Top, Bottom };

inline constexpr std::array<Face, 6> kAllFaces = {Face::Front, Face::Back, Face::Left,
                                                  Face::Right, Face::Top, Face::Bottom};

std::string_view face_name(Face face);
std::optional<Face> face_from_name(std::string_view name);

/// Face orientation in the camera frame (+X forward, +Y up, +Z right).
/// A face pixel at normalized position (a, b) in [-1, 1]^2 (a to the right,
/// b downward) looks along  forward + a * right - b * up.
///
///   face    forward  right  up
///   front     +X      +Z    +Y
///   right     +Z      -X    +Y
///   back      -X      -Z    +Y
///   left      -Z      +X    +Y
///   top       +Y      +Z    -X
///   bottom    -Y      +Z    +X
struct FaceBasis {
  Vec3 forward;
  Vec3 right;
  Vec3 up;
};

const FaceBasis& face_basis(Face face);

/// Direction through continuous face-pixel position (x, y) of an N x N face.
Vec3 face_direction(Face face, double x, double y, int face_size);

struct FaceHit {
  Face face;
  double x;  // continuous face-pixel coordinates
  double y;
};

/// Face whose axis has the largest component of `d` (ties: X, then Y, then Z).
FaceHit direction_to_face(const Vec3& d, int face_size);

/// Six square 90-degree perspective images.
struct CubeMap {
  int face_size = 0;
  std::array<Image, 6> faces;

  Image& face(Face f) { return faces[static_cast<std::size_t>(f)]; }
  const Image& face(Face f) const { return faces[static_cast<std::size_t>(f)]; }

  /// All faces square with identical side length.
  bool valid() const;
};

CubeMap panorama_to_cubemap(const Panorama& pano, int face_size, Interp interp = Interp::Bilinear,
                            Exec exec = Exec::Parallel);

Panorama cubemap_to_panorama(const CubeMap& cube, int width, int height,
                             Interp interp = Interp::Bilinear, Exec exec = Exec::Parallel);

/// Horizontal strip of the six faces in kAllFaces order (6N x N).
Image cubemap_strip(const CubeMap& cube);

}  // namespace panoworld::geo
