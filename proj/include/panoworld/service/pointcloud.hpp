#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/world/scene.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace panoworld::service {

struct ColoredPoint {
  geo::Vec3 position;
  Rgb color;
};

/// Back-projects every pixel with finite depth D. With longitude
/// lon = 2 pi u / W - pi and latitude lat = pi / 2 - pi v / H at the pixel
/// center (u, v) = (i + 0.5, j + 0.5), the camera-frame point is
/// (D cos(lat) cos(lon), D sin(lat), D cos(lat) sin(lon)). When `pose` is
/// given the point is moved to world coordinates. Throws
/// ErrorKind::DimensionMismatch when the sizes differ.
std::vector<ColoredPoint> depth_to_points(const Panorama& view, const DepthMap& depth,
                                          const std::optional<world::Pose>& pose = std::nullopt,
                                          Exec exec = Exec::Parallel);

/// Serial reference of depth_to_points, in pixel order.
std::vector<ColoredPoint> depth_to_points_reference(const Panorama& view, const DepthMap& depth,
                                                    const std::optional<world::Pose>& pose = std::nullopt);

/// ASCII PLY with float xyz and uchar rgb.
std::string to_ply(const std::vector<ColoredPoint>& points);
void write_ply(const std::filesystem::path& file, const std::vector<ColoredPoint>& points);
std::vector<ColoredPoint> read_ply(const std::filesystem::path& file);

}  // namespace panoworld::service
