#include "panoworld/geometry/cubemap.hpp"

#include "panoworld/common/error.hpp"

#include <cmath>
#include <string>

namespace panoworld::geo {

std::string_view face_name(Face face) {
  switch (face) {
    case Face::Front: return "front";
    case Face::Back: return "back";
    case Face::Left: return "left";
    case Face::Right: return "right";
    case Face::Top: return "top";
    case Face::Bottom: return "bottom";
  }
  return "front";
}

std::optional<Face> face_from_name(std::string_view name) {
  for (Face f : kAllFaces) {
    if (face_name(f) == name) return f;
  }
  return std::nullopt;
}

const FaceBasis& face_basis(Face face) {
  static const std::array<FaceBasis, 6> table = {{
      {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0)},    // front
      {Vec3(-1, 0, 0), Vec3(0, 0, -1), Vec3(0, 1, 0)},  // back
      {Vec3(0, 0, -1), Vec3(1, 0, 0), Vec3(0, 1, 0)},   // left
      {Vec3(0, 0, 1), Vec3(-1, 0, 0), Vec3(0, 1, 0)},   // right
      {Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(-1, 0, 0)},   // top
      {Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(1, 0, 0)},   // bottom
  }};
  return table[static_cast<std::size_t>(face)];
}

Vec3 face_direction(Face face, double x, double y, int face_size) {
  const FaceBasis& b = face_basis(face);
  const double a = 2.0 * x / face_size - 1.0;
  const double c = 2.0 * y / face_size - 1.0;
  return b.forward + a * b.right - c * b.up;
}

FaceHit direction_to_face(const Vec3& d, int face_size) {
  const double ax = std::abs(d.x());
  const double ay = std::abs(d.y());
  const double az = std::abs(d.z());
  Face face;
  if (ax >= ay && ax >= az) {
    face = d.x() >= 0 ? Face::Front : Face::Back;
  } else if (ay >= az) {
    face = d.y() >= 0 ? Face::Top : Face::Bottom;
  } else {
    face = d.z() >= 0 ? Face::Right : Face::Left;
  }
  const FaceBasis& b = face_basis(face);
  const double depth = d.dot(b.forward);
  const double a = d.dot(b.right) / depth;
  const double c = -d.dot(b.up) / depth;
  return {face, (a + 1.0) * 0.5 * face_size, (c + 1.0) * 0.5 * face_size};
}

bool CubeMap::valid() const {
  if (face_size < 1) return false;
  for (const Image& f : faces) {
    if (f.width() != face_size || f.height() != face_size) return false;
  }
  return true;
}

CubeMap panorama_to_cubemap(const Panorama& pano, int face_size, Interp interp, Exec exec) {
  if (face_size < 1) {
    throw Error(ErrorKind::Domain, "face_size must be >= 1, got " + std::to_string(face_size));
  }
  CubeMap cube;
  cube.face_size = face_size;
  for (Face f : kAllFaces) cube.face(f) = Image(face_size, face_size);
  const int w = pano.width();
  const int h = pano.height();
  const int rows = 6 * face_size;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int r = 0; r < rows; ++r) {
    const Face f = kAllFaces[static_cast<std::size_t>(r / face_size)];
    const int y = r % face_size;
    auto dst = cube.face(f).row(y);
    for (int x = 0; x < face_size; ++x) {
      const Vec3 d = face_direction(f, x + 0.5, y + 0.5, face_size);
      const PixelCoord p = direction_to_pixel(d, w, h);
      dst[x] = sample_panorama(pano, p.u, p.v, interp);
    }
  }
  return cube;
}

Panorama cubemap_to_panorama(const CubeMap& cube, int width, int height, Interp interp, Exec exec) {
  if (!cube.valid()) throw Error(ErrorKind::Domain, "cubemap faces must be square and equal");
  Panorama out(width, height);
  const int n = cube.face_size;
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int y = 0; y < height; ++y) {
    auto dst = out.row(y);
    for (int x = 0; x < width; ++x) {
      const FaceHit hit = direction_to_face(pixel_center_direction(x, y, width, height), n);
      dst[x] = sample_planar(cube.face(hit.face), hit.x, hit.y, interp);
    }
  }
  return out;
}

Image cubemap_strip(const CubeMap& cube) {
  const int n = cube.face_size;
  Image strip(6 * n, n);
  for (std::size_t i = 0; i < kAllFaces.size(); ++i) {
    const Image& f = cube.faces[i];
    for (int y = 0; y < n; ++y) {
      const auto src = f.row(y);
      std::copy(src.begin(), src.end(), strip.row(y).begin() + static_cast<long>(i) * n);
    }
  }
  return strip;
}

}  // namespace panoworld::geo
