#pragma once

#include <cmath>

namespace cospomdp {

struct PlannerParams {
  int num_sims = 500;
  int max_depth = 20;
  double exploration_const = std::sqrt(2.0) * 100.0;
  double discount = 0.95;

  void validate() const;
  friend bool operator==(const PlannerParams&, const PlannerParams&) = default;
};

/// Topological graph sampling and the two planner levels.
struct HierParams {
  int max_nodes = 10;
  double d_sep = 1.0;  ///< meters
  int deg_min = 3;
  int deg_max = 5;
  double resample_threshold = 0.5;
  PlannerParams high_level;
  PlannerParams low_level;

  void validate() const;
  friend bool operator==(const HierParams&, const HierParams&) = default;
};

struct GreedyParams {
  int num_particles = 1000;
  double lambda = 0.05;  ///< utility penalty per meter of travel
  double reinvigoration = 0.05;

  void validate() const;
  friend bool operator==(const GreedyParams&, const GreedyParams&) = default;
};

}  // namespace cospomdp
