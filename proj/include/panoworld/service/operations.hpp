#pragma once

#include "panoworld/explore/trajectory.hpp"
#include "panoworld/metrics/ielc.hpp"
#include "panoworld/service/jobs.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace panoworld::service {

// Request documents shared by the CLI (config files and flags) and the HTTP
// service (bodies), so both reach identical results. Unknown keys are ignored.

/// Keys of a scene's "params" object.
world::SceneParams scene_params_from_json(const nlohmann::json& doc);
/// {"scene": <scene doc>} or {"seed": n, "params": {...}}.
world::Scene scene_from_request(const nlohmann::json& req);

/// {"x", "z", "yaw"} at the scene's camera height; "y" overrides the height.
/// Missing fields default to the origin facing +X.
world::Pose pose_from_request(const world::Scene& scene, const nlohmann::json& doc);

/// {"heading_change" (rad) | "turn_deg", "distance", "frame_count", "climb"}.
/// frame_count defaults to one frame per 0.4 m.
explore::ExplorationConfig config_from_request(const nlohmann::json& doc);

/// {"pose", "width", "height", "generator": {...}, "session": {"seed",
/// "retention", "final_only"}} against a given scene.
explore::SessionRecipe recipe_from_request(std::shared_ptr<const world::Scene> scene, const nlohmann::json& req);

/// IELC run. Keys of metrics::ielc_options_from_json plus "supersample",
/// "scene_params", "generator" and "loops" (alias of n_loops).
metrics::IelcReport ielc_request(const nlohmann::json& req, const ProgressFn& progress = {});

/// EQA run: {"agent", "seed", "mode" (unimodal | multimodal | imagination |
/// all), "judge", "suite" (file path; built-in when absent), "suite_options",
/// "generator", "max_concurrent_requests", "transcripts" (file path)}.
/// "http" agents and judges without a URL read PANOWORLD_AGENT_URL and
/// PANOWORLD_JUDGE_URL.
nlohmann::json eqa_request(const nlohmann::json& req, const ProgressFn& progress = {});

/// Dataset generation into `dir`: {"paths", "width", "height", "seed",
/// "supersample"} plus the scene request keys.
nlohmann::json dataset_request(const nlohmann::json& req, const std::filesystem::path& dir,
                               const ProgressFn& progress = {});

}  // namespace panoworld::service
