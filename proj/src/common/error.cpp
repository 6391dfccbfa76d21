#include "panoworld/common/error.hpp"

namespace panoworld {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::Render: return "render";
    case ErrorKind::NoFreePath: return "no-free-path";
    case ErrorKind::Sampling: return "sampling";
    case ErrorKind::Generator: return "generator";
    case ErrorKind::Pilot: return "pilot";
    case ErrorKind::Contradiction: return "contradiction";
    case ErrorKind::Policy: return "policy";
    case ErrorKind::Protocol: return "protocol";
    case ErrorKind::UndefinedReport: return "undefined-report";
    case ErrorKind::Io: return "io";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace panoworld
