#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "cospomdp/params.hpp"
#include "cospomdp/scenario.hpp"

namespace cospomdp {

inline constexpr int kScenarioSchemaVersion = 1;

// Scenario JSON, schema version 1:
//
//   {
//     "schema_version": 1,
//     "name": "kitchen-01",
//     "map": {"width": 16, "height": 12, "cell_size": 0.25,
//             "rows": ["....##..", ...]}            // or "obstacles": [[col, row], ...]
//     "target": {"class": "Knife", "cell": [3, 4],
//                "detector": {"tp": 0.377, "fp": 0.087, "r": 1.68, "sigma": 0.5}},
//     "objects": [{"class": "StoveKnob", "cell": [4, 4],
//                  "detector": "Kitchen/StoveKnob",  // preset name or parameter object
//                  "correlation": {"relation": "close", "d": 1.25}}],
//     "ablation": "accurate",                       // or "wrong"
//     "init_pose": {"cell": [0, 0], "heading": 0},
//     "max_steps": 100,
//     "success_distance": 1.0,
//     "hierarchy": {"max_nodes": 10, "d_sep": 1.0, "deg_min": 3, "deg_max": 5,
//                   "resample_threshold": 0.5,
//                   "high_level": {"num_sims": 500, ...}, "low_level": {...}},
//     "greedy": {"num_particles": 1000, "lambda": 0.05, "reinvigoration": 0.05}
//   }
//
// Rows list map rows from row 0 upward; '#' marks an obstacle. Everything
// after "init_pose" is optional and defaults as in ScenarioSpec.

nlohmann::json to_json(const PlannerParams& p);
nlohmann::json to_json(const HierParams& p);
nlohmann::json to_json(const GreedyParams& p);
PlannerParams planner_params_from_json(const nlohmann::json& j, PlannerParams defaults = {});
HierParams hier_params_from_json(const nlohmann::json& j, HierParams defaults = {});
GreedyParams greedy_params_from_json(const nlohmann::json& j, GreedyParams defaults = {});

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
/// Parses and validates; throws std::invalid_argument on schema or model errors.
ScenarioSpec scenario_from_json(const nlohmann::json& j);

ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const ScenarioSpec& spec);

}  // namespace cospomdp
