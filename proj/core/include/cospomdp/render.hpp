#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cospomdp/scenario.hpp"

namespace cospomdp {

struct BeliefSnapshot {
  int t = 0;
  std::vector<double> dist;  ///< by cell index
};

struct RenderInput {
  ScenarioSpec spec;
  std::vector<Pose> poses;  ///< viewpoints in visiting order
  std::vector<BeliefSnapshot> snapshots;
};

/// Builds render input from a trial trace, keeping at most `max_snapshots`
/// evenly spaced belief snapshots (always including the last one).
RenderInput render_input_from_trace(const nlohmann::json& trace, int max_snapshots = 4);

/// SVG with a trajectory panel followed by one panel per snapshot. Row 0 is
/// drawn at the bottom so headings read counter-clockwise.
std::string render_svg(const RenderInput& input);

void write_svg(const std::filesystem::path& path, const std::string& svg);

}  // namespace cospomdp
