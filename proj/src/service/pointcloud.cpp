#include "panoworld/service/pointcloud.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/common/image_io.hpp"
#include "panoworld/geometry/spherical.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace panoworld::service {

namespace {

void check_sizes(const Panorama& view, const DepthMap& depth) {
  if (view.width() != depth.width() || view.height() != depth.height()) {
    throw Error(ErrorKind::DimensionMismatch, "panorama " + std::to_string(view.width()) + "x" +
                                                  std::to_string(view.height()) + " vs depth " +
                                                  std::to_string(depth.width()) + "x" + std::to_string(depth.height()));
  }
}

geo::Vec3 back_project(int i, int j, int w, int h, double d, const std::optional<world::Pose>& pose) {
  const double lon = geo::kTwoPi * (i + 0.5) / w - geo::kPi;
  const double lat = geo::kHalfPi - geo::kPi * (j + 0.5) / h;
  const geo::Vec3 cam(d * std::cos(lat) * std::cos(lon), d * std::sin(lat), d * std::cos(lat) * std::sin(lon));
  if (!pose) return cam;
  // Yaw turns +X toward +Z about +Y.
  const double c = std::cos(pose->yaw), s = std::sin(pose->yaw);
  return pose->position + geo::Vec3(c * cam.x() - s * cam.z(), cam.y(), s * cam.x() + c * cam.z());
}

}  // namespace

std::vector<ColoredPoint> depth_to_points(const Panorama& view, const DepthMap& depth,
                                          const std::optional<world::Pose>& pose, Exec exec) {
  check_sizes(view, depth);
  const int w = view.width(), h = view.height();
  std::vector<std::vector<ColoredPoint>> rows(static_cast<std::size_t>(h));
#pragma omp parallel for schedule(static) if (exec == Exec::Parallel)
  for (int j = 0; j < h; ++j) {
    auto& row = rows[static_cast<std::size_t>(j)];
    for (int i = 0; i < w; ++i) {
      const double d = depth.at(i, j);
      if (!std::isfinite(d)) continue;
      row.push_back({back_project(i, j, w, h, d, pose), view.at(i, j)});
    }
  }
  std::vector<ColoredPoint> out;
  for (auto& row : rows) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<ColoredPoint> depth_to_points_reference(const Panorama& view, const DepthMap& depth,
                                                    const std::optional<world::Pose>& pose) {
  check_sizes(view, depth);
  std::vector<ColoredPoint> out;
  for (int j = 0; j < view.height(); ++j) {
    for (int i = 0; i < view.width(); ++i) {
      const double d = depth.at(i, j);
      if (std::isfinite(d)) out.push_back({back_project(i, j, view.width(), view.height(), d, pose), view.at(i, j)});
    }
  }
  return out;
}

std::string to_ply(const std::vector<ColoredPoint>& points) {
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  char line[128];
  const auto byte = [](float v) { return static_cast<int>(std::lround(clamp01(v) * 255.0f)); };
  for (const ColoredPoint& p : points) {
    std::snprintf(line, sizeof(line), "%.6f %.6f %.6f %d %d %d\n", p.position.x(), p.position.y(), p.position.z(),
                  byte(p.color.r), byte(p.color.g), byte(p.color.b));
    out << line;
  }
  return out.str();
}

void write_ply(const std::filesystem::path& file, const std::vector<ColoredPoint>& points) {
  io::write_text(file, to_ply(points));
}

std::vector<ColoredPoint> read_ply(const std::filesystem::path& file) {
  std::istringstream in(io::read_text(file));
  std::string word;
  std::size_t n = 0;
  in >> word;
  if (word != "ply") throw Error(ErrorKind::Protocol, "not a PLY file: " + file.string());
  while (in >> word && word != "end_header") {
    if (word == "vertex") in >> n;
  }
  std::vector<ColoredPoint> points(n);
  for (ColoredPoint& p : points) {
    int r, g, b;
    if (!(in >> p.position.x() >> p.position.y() >> p.position.z() >> r >> g >> b)) {
      throw Error(ErrorKind::Protocol, "truncated PLY: " + file.string());
    }
    p.color = {r / 255.0f, g / 255.0f, b / 255.0f};
  }
  return points;
}

}  // namespace panoworld::service
