#pragma once

#include "panoworld/common/image.hpp"
#include "panoworld/world/raycast.hpp"
#include "panoworld/world/scene.hpp"

namespace panoworld::world {

struct RenderOptions {
  int supersample = 1;  // s x s rays per pixel, box-filtered
  Exec exec = Exec::Parallel;
};

/// Ground-truth equirectangular view from `pose`. Pixel (i, j) looks along
/// world azimuth yaw + phi(i) and elevation theta(j). Channels are quantized
/// to the 8-bit grid. Throws ErrorKind::Render when the eye is inside a solid
/// or below the ground plane, ErrorKind::Domain for bad sizes.
Panorama render_panorama(const Scene& scene, const Pose& pose, int width, int height,
                         const RenderOptions& options = {});

/// Distance along each pixel-center ray to the first surface; kInfiniteDepth for sky.
DepthMap render_depth(const Scene& scene, const Pose& pose, int width, int height,
                      Exec exec = Exec::Parallel);

/// Depth along one camera-frame viewing direction (phi relative to the heading).
double ray_depth(const Scene& scene, const Pose& pose, const geo::SphericalCoord& view);

/// Unaccelerated serial renderer: every ray is tested against every primitive.
/// Kept as the reference the culled renderer must match bit for bit.
Panorama render_panorama_reference(const Scene& scene, const Pose& pose, int width, int height,
                                   int supersample = 1);

/// World-space unit direction through continuous pixel position (u, v).
Vec3 pixel_ray(double u, double v, int width, int height, double yaw);

}  // namespace panoworld::world
