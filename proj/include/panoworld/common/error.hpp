#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace panoworld {

/// Error classes surfaced by the library. The CLI maps each class to an exit code.
enum class ErrorKind {
  Domain,             // argument outside its mathematical domain
  DimensionMismatch,  // images/videos of incompatible shape
  Render,             // camera pose inside a primitive
  NoFreePath,         // rejection sampling exhausted its retry budget
  Sampling,           // infeasible sampler bounds
  Generator,          // world generator failure (carries the step index)
  Pilot,              // pilot emitted an unparseable response (carries the raw text)
  Contradiction,      // observation impossible under every hypothesis
  Policy,             // policy/agent protocol violation
  Protocol,           // malformed wire message or document
  UndefinedReport,    // metric over an empty record set
  Io,
  Transport,          // external endpoint unreachable
  Usage,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string detail = {})
      : std::runtime_error(message), kind_(kind), detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Extra payload, e.g. the raw pilot response or the failing step index.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace panoworld
