#pragma once

#include "panoworld/eqa/scenario.hpp"

#include <cstdint>
#include <vector>

namespace panoworld::eqa {

struct SuiteOptions {
  std::uint64_t seed = 7;
  int single_pairs = 40;  // control pairs of single-agent scenarios
  int multi_pairs = 20;
  int view_width = 128;
  int view_height = 64;
  /// Render every hypothesis to confirm what each pose can and cannot see;
  /// layouts failing the check are resampled.
  bool verify = true;
};

/// Built-in driving suite. Single-agent kinds: blocked-ambulance and
/// blind-corner (the hazard is hidden from the agent but visible from a
/// nearby vantage point it can walk to), open-road (hazard in plain view).
/// Multi-agent kinds: taxi-stop and crossing (hidden from the agent, visible
/// to another agent). Every scenario belongs to a control pair that differs
/// only in the hazard slot. Odd pairs use the low-texture style.
std::vector<Scenario> builtin_suite(const SuiteOptions& options = {});

/// Canonical choice texts.
inline constexpr const char* kProceed = "Proceed through the intersection at normal speed.";
inline constexpr const char* kYield = "Pull over to the right and let the emergency vehicle pass.";
inline constexpr const char* kWait = "Stop and wait for the pedestrian to cross.";
inline constexpr const char* kReverse = "Reverse back down the street.";

}  // namespace panoworld::eqa
