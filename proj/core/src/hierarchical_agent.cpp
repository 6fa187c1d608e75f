#include "cospomdp/hierarchical_agent.hpp"

#include "cospomdp/low_level.hpp"

namespace cospomdp {

HierarchicalAgent::HierarchicalAgent(CosModel model, const Pose& init, HierParams params,
                                     std::string name)
    : model_(std::move(model)),
      params_(params),
      name_(std::move(name)),
      projection_(model_.map(), init.cell),
      belief_(CosBelief::uniform(model_.map(), init)) {
  params_.validate();
}

Action HierarchicalAgent::act(const std::optional<JointObservation>& z, Rng& rng) {
  if (z) {
    belief_ = belief_update(belief_, last_.value_or(Action::RotateLeft), model_.project(*z), model_);
  }
  const GridMap& m = model_.map();
  captured_ = graph_ ? captured_mass(*graph_, m, belief_.target_dist, params_.d_sep) : 0.0;
  resampled_ = !graph_ || captured_ < params_.resample_threshold;
  if (resampled_) {
    graph_ = sample_topo_graph(m, projection_, belief_.target_dist, params_, rng);
  }

  const Subgoal goal = high_level_plan(*graph_, belief_, model_, params_.high_level, rng).action;
  subgoal_ = to_string(goal, *graph_);
  Action a = Action::Done;
  switch (goal.kind) {
    case Subgoal::Kind::NavigateTo: {
      const NavResult nav = astar(m, belief_.robot, graph_->nodes[goal.node]);
      a = nav.status == NavStatus::Step ? to_action(nav.action) : local_search(rng);
      break;
    }
    case Subgoal::Kind::SearchLocal:
      a = local_search(rng);
      break;
    case Subgoal::Kind::Done:
      a = Action::Done;
      break;
  }
  last_ = a;
  return a;
}

Action HierarchicalAgent::local_search(Rng& rng) const {
  const LowLevelModel low(model_);
  return plan(belief_, low, params_.low_level, rng).action;
}

std::unique_ptr<Agent> make_target_pomdp_agent(const CosModel& model, const Pose& init,
                                               const HierParams& params) {
  return std::make_unique<HierarchicalAgent>(model.target_only(), init, params, "target-pomdp");
}

}  // namespace cospomdp
