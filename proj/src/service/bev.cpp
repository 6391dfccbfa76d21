#include "panoworld/service/bev.hpp"

#include "panoworld/common/error.hpp"
#include "panoworld/geometry/cubemap.hpp"

#include <cmath>

namespace panoworld::service {

Image bird_eye_view(const explore::ExplorationSession& session, double height, int face_size) {
  if (!(height >= 0.0) || !std::isfinite(height)) throw Error(ErrorKind::Domain, "BEV height must be >= 0");
  if (face_size < 1) throw Error(ErrorKind::Domain, "BEV face size must be positive");
  Panorama view = session.current_view();
  if (height > 0.0) {
    explore::ExplorationSession up = session.fork();
    explore::ExplorationConfig climb;
    climb.climb = height;
    up.step(climb);
    view = up.current_view();
  }
  return geo::panorama_to_cubemap(view, face_size).face(geo::Face::Bottom);
}

}  // namespace panoworld::service
