#pragma once

#include "panoworld/explore/session.hpp"

namespace panoworld::service {

/// Bird's-eye view: imagines climbing `height` meters straight up in a fork
/// of `session` and returns the bottom cube face of the view up there. The
/// face's top edge points along the agent's heading and its center looks
/// straight down. The session itself is not modified.
Image bird_eye_view(const explore::ExplorationSession& session, double height, int face_size);

}  // namespace panoworld::service
