#pragma once

// Partially observable UCT over a black-box generative model.
//
// A model type M provides
//   State, Action, Observation, Belief
//   State sample_state(const Belief&, Rng&) const
//   std::vector<Action> actions(const State&) const
//   Transition<State> transition(const State&, const Action&, Rng&) const
//   Observation observe(const State& next, const Action&, Rng&) const
//   std::vector<Action> rollout_actions(const State&) const
//
// A transition may span several primitive steps (`duration`); its reward is
// already discounted within the span and the continuation is discounted by
// discount^duration.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <utility>
#include <vector>

#include "cospomdp/params.hpp"
#include "cospomdp/rng.hpp"

namespace cospomdp {

template <class S>
struct Transition {
  S state;
  double reward = 0.0;
  bool terminal = false;
  int duration = 1;
};

template <class M>
concept GenerativeModel =
    requires(const M& m, const typename M::State& s, const typename M::Action& a,
             const typename M::Belief& b, Rng& rng) {
      { m.sample_state(b, rng) } -> std::convertible_to<typename M::State>;
      { m.actions(s) } -> std::convertible_to<std::vector<typename M::Action>>;
      { m.transition(s, a, rng) } -> std::convertible_to<Transition<typename M::State>>;
      { m.observe(s, a, rng) } -> std::convertible_to<typename M::Observation>;
      { m.rollout_actions(s) } -> std::convertible_to<std::vector<typename M::Action>>;
      requires std::equality_comparable<typename M::Observation>;
    };

template <class Action>
struct PlanResult {
  Action action;
  std::vector<Action> actions;  ///< root actions in index order
  std::vector<double> q;
  std::vector<int> visits;
};

/// Discounted return of the model's rollout policy: a uniform draw from
/// rollout_actions at each step, for at most `depth` steps.
template <GenerativeModel M>
double rollout(typename M::State state, const M& model, int depth, double discount, Rng& rng) {
  double ret = 0.0;
  double scale = 1.0;
  for (int d = 0; d < depth; ++d) {
    const std::vector<typename M::Action> candidates = model.rollout_actions(state);
    if (candidates.empty()) break;
    const auto& a = candidates[uniform_index(rng, candidates.size())];
    Transition<typename M::State> tr = model.transition(state, a, rng);
    ret += scale * tr.reward;
    if (tr.terminal) break;
    scale *= std::pow(discount, tr.duration);
    state = std::move(tr.state);
  }
  return ret;
}

template <GenerativeModel M>
class Pouct {
 public:
  using State = typename M::State;
  using Action = typename M::Action;
  using Observation = typename M::Observation;

  Pouct(const M& model, PlannerParams params) : model_(model), params_(params) {
    params_.validate();
  }

  PlanResult<Action> plan(const typename M::Belief& belief, Rng& rng) {
    nodes_.clear();
    nodes_.emplace_back();
    for (int sim = 0; sim < params_.num_sims; ++sim) {
      simulate(model_.sample_state(belief, rng), 0, 0, rng);
    }
    const VNode& root = nodes_[0];
    PlanResult<Action> out{};
    std::size_t best = 0;
    bool found = false;
    for (std::size_t k = 0; k < root.edges.size(); ++k) {
      const Edge& e = root.edges[k];
      out.actions.push_back(e.action);
      out.q.push_back(e.q);
      out.visits.push_back(e.visits);
      if (e.visits > 0 && (!found || e.q > root.edges[best].q)) {
        best = k;
        found = true;
      }
    }
    out.action = root.edges.at(best).action;
    return out;
  }

  std::size_t tree_size() const { return nodes_.size(); }

 private:
  struct Child {
    Observation obs;
    std::size_t node;
  };
  struct Edge {
    Action action;
    int visits = 0;
    double q = 0.0;
    std::vector<Child> children;
  };
  struct VNode {
    int visits = 0;
    bool expanded = false;
    std::vector<Edge> edges;
  };

  std::size_t select(std::size_t node) const {
    const VNode& v = nodes_[node];
    const double log_n = std::log(static_cast<double>(std::max(v.visits, 1)));
    std::size_t best = 0;
    double best_score = 0.0;
    for (std::size_t k = 0; k < v.edges.size(); ++k) {
      const Edge& e = v.edges[k];
      if (e.visits == 0) return k;
      const double score = e.q + params_.exploration_const * std::sqrt(log_n / e.visits);
      if (k == 0 || score > best_score) {
        best = k;
        best_score = score;
      }
    }
    return best;
  }

  double simulate(const State& s, std::size_t node, int depth, Rng& rng) {
    if (depth >= params_.max_depth) return 0.0;
    if (!nodes_[node].expanded) {
      for (const Action& a : model_.actions(s)) {
        nodes_[node].edges.push_back(Edge{a, 0, 0.0, {}});
      }
      nodes_[node].expanded = true;
    }
    if (nodes_[node].edges.empty()) return 0.0;
    const std::size_t k = select(node);
    const Action action = nodes_[node].edges[k].action;
    Transition<State> tr = model_.transition(s, action, rng);
    double ret = tr.reward;
    if (!tr.terminal) {
      const double scale = std::pow(params_.discount, tr.duration);
      Observation obs = model_.observe(tr.state, action, rng);
      std::size_t child = 0;
      bool fresh = true;
      for (const Child& c : nodes_[node].edges[k].children) {
        if (c.obs == obs) {
          child = c.node;
          fresh = false;
          break;
        }
      }
      if (fresh) {
        child = nodes_.size();
        nodes_.emplace_back();
        nodes_[child].visits = 1;
        nodes_[node].edges[k].children.push_back(Child{std::move(obs), child});
        ret += scale * rollout(tr.state, model_, params_.max_depth - depth - 1, params_.discount, rng);
      } else {
        ret += scale * simulate(tr.state, child, depth + 1, rng);
      }
    }
    VNode& v = nodes_[node];
    Edge& e = v.edges[k];
    ++v.visits;
    ++e.visits;
    e.q += (ret - e.q) / e.visits;
    return ret;
  }

  const M& model_;
  PlannerParams params_;
  std::vector<VNode> nodes_;
};

template <GenerativeModel M>
PlanResult<typename M::Action> plan(const typename M::Belief& belief, const M& model,
                                    const PlannerParams& params, Rng& rng) {
  Pouct<M> planner(model, params);
  return planner.plan(belief, rng);
}

}  // namespace cospomdp
