#include "cospomdp/low_level.hpp"

namespace cospomdp {

Transition<CosState> LowLevelModel::transition(const CosState& s, const Action& a, Rng&) const {
  Transition<CosState> tr{s, reward(s, a, *model_), a == Action::Done, 1};
  if (const auto m = as_move(a)) {
    tr.state.robot = apply_move(s.robot, *m, model_->map());
  }
  return tr;
}

JointObservation LowLevelModel::observe(const CosState& next, const Action&, Rng& rng) const {
  return model_->sample_observation(next.robot, next.target, rng);
}

std::vector<Action> LowLevelModel::rollout_actions(const CosState& s) const {
  const GridMap& m = model_->map();
  const VisibilityMap& vis = model_->visibility();
  const int target = m.index(s.target);
  const int before = distance_sq(s.robot.cell, s.target);
  const bool seen = vis.is_visible(s.robot, target);
  std::vector<Action> out;
  for (MoveAction mv : kMoveActions) {
    const Pose next = apply_move(s.robot, mv, m);
    if (distance_sq(next.cell, s.target) < before || (!seen && vis.is_visible(next, target))) {
      out.push_back(to_action(mv));
    }
  }
  if (out.empty()) {
    for (MoveAction mv : kMoveActions) out.push_back(to_action(mv));
  }
  return out;
}

}  // namespace cospomdp
