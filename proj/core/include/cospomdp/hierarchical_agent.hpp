#pragma once

#include <memory>
#include <optional>
#include <string>

#include "cospomdp/agent.hpp"
#include "cospomdp/hierarchy.hpp"

namespace cospomdp {

/// Online hierarchical planner: one exact belief shared by a subgoal-level
/// POUCT over a belief-sampled topological graph, A* navigation, and a
/// primitive-level POUCT for local search.
class HierarchicalAgent final : public Agent {
 public:
  HierarchicalAgent(CosModel model, const Pose& init, HierParams params,
                    std::string name = "cospomdp");

  std::string_view name() const override { return name_; }
  Action act(const std::optional<JointObservation>& z, Rng& rng) override;
  std::vector<double> target_belief() const override { return belief_.target_dist; }
  std::string subgoal() const override { return subgoal_; }
  std::uint64_t belief_hash() const override { return belief_.hash(); }

  const CosBelief& belief() const { return belief_; }
  const CosModel& model() const { return model_; }
  const std::optional<TopoGraph>& graph() const { return graph_; }
  /// Whether the last call resampled the graph, and the mass it saw before.
  bool resampled() const { return resampled_; }
  double last_captured_mass() const { return captured_; }

 private:
  Action local_search(Rng& rng) const;

  CosModel model_;
  HierParams params_;
  std::string name_;
  PlaceProjection projection_;
  CosBelief belief_;
  std::optional<TopoGraph> graph_;
  std::optional<Action> last_;
  std::string subgoal_;
  bool resampled_ = false;
  double captured_ = 0.0;
};

/// The hierarchical agent with only the target detectable.
std::unique_ptr<Agent> make_target_pomdp_agent(const CosModel& model, const Pose& init,
                                               const HierParams& params);

}  // namespace cospomdp
