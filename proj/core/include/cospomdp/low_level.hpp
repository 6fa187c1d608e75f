#pragma once

#include <vector>

#include "cospomdp/cos_pomdp.hpp"
#include "cospomdp/pouct.hpp"

namespace cospomdp {

/// Generative model of the COS-POMDP over primitive actions, for POUCT.
/// Rollouts draw uniformly from the moves that bring the robot strictly
/// closer to the state's target or bring it into view; Done is never rolled
/// out.
class LowLevelModel {
 public:
  using State = CosState;
  using Action = cospomdp::Action;
  using Observation = JointObservation;
  using Belief = CosBelief;

  explicit LowLevelModel(const CosModel& model) : model_(&model) {}

  const CosModel& model() const { return *model_; }

  State sample_state(const Belief& b, Rng& rng) const {
    return {b.robot, b.sample_target(model_->map(), rng)};
  }
  std::vector<Action> actions(const State&) const {
    return {std::begin(kAllActions), std::end(kAllActions)};
  }
  Transition<State> transition(const State& s, const Action& a, Rng& rng) const;
  Observation observe(const State& next, const Action& a, Rng& rng) const;
  std::vector<Action> rollout_actions(const State& s) const;

 private:
  const CosModel* model_;
};

static_assert(GenerativeModel<LowLevelModel>);

}  // namespace cospomdp
