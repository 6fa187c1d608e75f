#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cospomdp/grid.hpp"
#include "cospomdp/params.hpp"
#include "cospomdp/sensing.hpp"

namespace cospomdp {

/// "wrong" flips every close/far relation the agent is told about; the true
/// object placement is unaffected.
enum class Ablation : std::uint8_t { Accurate, Wrong };

std::string_view to_string(Ablation a);

struct TargetSpec {
  std::string cls;
  Cell cell;
  DetectorParams detector;
};

struct ObjectSpec {
  std::string cls;
  Cell cell;
  DetectorParams detector;
  CorrelationSpec correlation;
};

struct ScenarioSpec {
  std::string name;
  GridMap map;
  TargetSpec target;
  std::vector<ObjectSpec> objects;
  Pose init_pose;
  int max_steps = 100;
  double success_distance = 1.0;  ///< meters
  Ablation ablation = Ablation::Accurate;
  HierParams hierarchy;
  GreedyParams greedy;

  /// Correlation specs as the agent sees them under `ablation`.
  std::vector<CorrelationSpec> believed_correlations() const;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

}  // namespace cospomdp
