#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cospomdp/cos_pomdp.hpp"
#include "cospomdp/params.hpp"
#include "cospomdp/pouct.hpp"

namespace cospomdp {

/// Assigns every free cell to its nearest cell reachable from an origin
/// (Euclidean, ties to the lower index) and projects target beliefs onto the
/// reachable cells.
class PlaceProjection {
 public:
  PlaceProjection(const GridMap& map, Cell origin);

  const std::vector<int>& reachable() const { return reachable_; }
  /// Cell index of the place for `cell_index`; -1 on obstacles.
  int place_of(int cell_index) const { return place_[cell_index]; }
  /// p(place) = sum of b_target over the cells mapped to it, by cell index.
  std::vector<double> project(const std::vector<double>& b_target) const;

 private:
  std::vector<int> reachable_;
  std::vector<int> place_;
};

struct TopoEdge {
  int u = 0;
  int v = 0;
  double cost = 0.0;  ///< shortest-path meters

  friend bool operator==(const TopoEdge&, const TopoEdge&) = default;
};

struct TopoGraph {
  std::vector<Cell> nodes;
  std::vector<TopoEdge> edges;
  std::vector<std::vector<int>> adjacency;  ///< sorted neighbor lists
  std::vector<double> node_mass;            ///< captured belief per node when sampled
  std::vector<std::vector<int>> steps;      ///< MoveAhead steps from each node to every cell

  int degree(int node) const { return static_cast<int>(adjacency[node].size()); }
  bool connected() const;
  /// Smallest pairwise Euclidean node distance in cells (infinity for < 2 nodes).
  double min_separation() const;
  /// Node with the fewest steps to `c`, ties to the lower index; -1 if none reaches it.
  int nearest_node(Cell c, const GridMap& map) const;

  friend bool operator==(const TopoGraph& a, const TopoGraph& b) {
    return a.nodes == b.nodes && a.edges == b.edges;
  }
};

/// Mass of b_target on cells within `radius` meters of some node.
double captured_mass(const TopoGraph& g, const GridMap& map, const std::vector<double>& b_target,
                     double radius);

/// Samples up to max_nodes places proportionally to the projected belief with
/// pairwise separation >= d_sep, then connects them with a degree-capped
/// spanning tree and tops every node up to min(deg_min, n - 1) neighbors.
TopoGraph sample_topo_graph(const GridMap& map, const PlaceProjection& proj,
                            const std::vector<double>& b_target, const HierParams& params,
                            Rng& rng);

struct Subgoal {
  enum class Kind : std::uint8_t { NavigateTo, SearchLocal, Done };
  Kind kind = Kind::SearchLocal;
  int node = -1;

  static Subgoal navigate(int node) { return {Kind::NavigateTo, node}; }
  static Subgoal search_local() { return {Kind::SearchLocal, -1}; }
  static Subgoal done() { return {Kind::Done, -1}; }

  friend bool operator==(const Subgoal&, const Subgoal&) = default;
};

std::string to_string(const Subgoal& g, const TopoGraph& graph);

/// COS-POMDP over subgoals. The robot's place is its nearest node; it may
/// navigate to that place (when not on it) or to one of its neighbors,
/// search locally, or declare Done. A completed subgoal leaves the robot
/// facing the state's target.
class HighLevelModel {
 public:
  using State = CosState;
  using Action = Subgoal;
  using Observation = JointObservation;
  using Belief = CosBelief;

  HighLevelModel(const CosModel& model, const TopoGraph& graph, double discount)
      : model_(&model), graph_(&graph), discount_(discount) {}

  State sample_state(const Belief& b, Rng& rng) const {
    return {b.robot, b.sample_target(model_->map(), rng)};
  }
  std::vector<Action> actions(const State& s) const;
  Transition<State> transition(const State& s, const Action& a, Rng& rng) const;
  Observation observe(const State& next, const Action& a, Rng& rng) const;
  std::vector<Action> rollout_actions(const State& s) const;

 private:
  const CosModel* model_;
  const TopoGraph* graph_;
  double discount_;
};

static_assert(GenerativeModel<HighLevelModel>);

PlanResult<Subgoal> high_level_plan(const TopoGraph& graph, const CosBelief& belief,
                                    const CosModel& model, const PlannerParams& params, Rng& rng);

enum class NavStatus : std::uint8_t { Step, Arrived, Unreachable };

struct NavResult {
  NavStatus status = NavStatus::Unreachable;
  MoveAction action = MoveAction::MoveAhead;  ///< first action when status is Step
  std::vector<MoveAction> plan;               ///< full minimal action sequence
};

/// A* over (cell, heading) with unit cost per primitive action. The goal is
/// reaching `goal` with any heading, or exactly `goal_heading` when given.
NavResult astar(const GridMap& map, const Pose& from, Cell goal,
                std::optional<int> goal_heading = std::nullopt);

}  // namespace cospomdp
