#include "cospomdp/scenario.hpp"

#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace cospomdp {

void PlannerParams::validate() const {
  if (num_sims < 1) throw std::invalid_argument("planner num_sims must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("planner max_depth must be >= 1");
  if (!(discount > 0.0 && discount < 1.0)) {
    throw std::invalid_argument("planner discount must lie in (0, 1)");
  }
  if (!(exploration_const >= 0.0)) {
    throw std::invalid_argument("planner exploration constant must be nonnegative");
  }
}

void HierParams::validate() const {
  if (max_nodes < 1) throw std::invalid_argument("hierarchy max_nodes must be >= 1");
  if (!(d_sep >= 0.0)) throw std::invalid_argument("hierarchy d_sep must be nonnegative");
  if (deg_min < 1 || deg_max < deg_min) {
    throw std::invalid_argument("hierarchy degree bounds must satisfy 1 <= deg_min <= deg_max");
  }
  if (!(resample_threshold > 0.0 && resample_threshold <= 1.0)) {
    throw std::invalid_argument("hierarchy resample_threshold must lie in (0, 1]");
  }
  high_level.validate();
  low_level.validate();
}

void GreedyParams::validate() const {
  if (num_particles < 1) throw std::invalid_argument("greedy num_particles must be >= 1");
  if (!(lambda >= 0.0)) throw std::invalid_argument("greedy lambda must be nonnegative");
  if (!(reinvigoration >= 0.0 && reinvigoration <= 1.0)) {
    throw std::invalid_argument("greedy reinvigoration must lie in [0, 1]");
  }
}

std::string_view to_string(Ablation a) { return a == Ablation::Accurate ? "accurate" : "wrong"; }

std::vector<CorrelationSpec> ScenarioSpec::believed_correlations() const {
  std::vector<CorrelationSpec> out;
  out.reserve(objects.size());
  for (const ObjectSpec& o : objects) {
    out.push_back(ablation == Ablation::Wrong ? o.correlation.flipped() : o.correlation);
  }
  return out;
}

void ScenarioSpec::validate() const {
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (!(success_distance >= 0.0)) throw std::invalid_argument("success_distance must be >= 0");
  if (!map.is_free(init_pose.cell)) throw std::invalid_argument("init pose is not a free cell");
  if (init_pose.heading < 0 || init_pose.heading >= kNumHeadings) {
    throw std::invalid_argument("init heading must be one of 8 values");
  }
  std::set<std::string> names{target.cls};
  if (!map.is_free(target.cell)) {
    throw std::invalid_argument(fmt::format("target '{}' is not on a free cell", target.cls));
  }
  target.detector.validate();
  const std::vector<CorrelationSpec> believed = believed_correlations();
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const ObjectSpec& o = objects[i];
    if (!names.insert(o.cls).second) {
      throw std::invalid_argument(fmt::format("duplicate object class '{}'", o.cls));
    }
    if (!map.is_free(o.cell)) {
      throw std::invalid_argument(fmt::format("object '{}' is not on a free cell", o.cls));
    }
    o.detector.validate();
    o.correlation.validate();
    if (!CorrelationModel(map, believed[i]).well_formed(map)) {
      throw std::invalid_argument(fmt::format(
          "correlation of '{}' ({} {} m) has an empty support for some target cell", o.cls,
          to_string(believed[i].relation), believed[i].d));
    }
  }
  if (!shortest_path_length(map, init_pose, target.cell, success_distance)) {
    throw std::invalid_argument("target cannot be reached from the init pose");
  }
  hierarchy.validate();
  greedy.validate();
}

}  // namespace cospomdp
