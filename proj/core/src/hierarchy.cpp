#include "cospomdp/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

namespace cospomdp {

namespace {

constexpr double kTol = 1e-9;

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
  std::vector<int> parent;
};

}  // namespace

PlaceProjection::PlaceProjection(const GridMap& map, Cell origin)
    : place_(map.num_cells(), -1) {
  for (const Cell& c : reachable_cells(map, origin)) reachable_.push_back(map.index(c));
  std::sort(reachable_.begin(), reachable_.end());
  for (int r : reachable_) place_[r] = r;
  for (const Cell& c : map.free_cells()) {
    const int idx = map.index(c);
    if (place_[idx] >= 0) continue;
    int best = -1;
    int best_d = std::numeric_limits<int>::max();
    for (int r : reachable_) {
      const int d = distance_sq(c, map.cell(r));
      if (d < best_d) {
        best_d = d;
        best = r;
      }
    }
    place_[idx] = best;
  }
}

std::vector<double> PlaceProjection::project(const std::vector<double>& b_target) const {
  std::vector<double> p(place_.size(), 0.0);
  for (std::size_t i = 0; i < place_.size(); ++i) {
    if (place_[i] >= 0) p[place_[i]] += b_target[i];
  }
  return p;
}

// ---------------------------------------------------------------------------

bool TopoGraph::connected() const {
  if (nodes.empty()) return false;
  std::vector<char> seen(nodes.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == nodes.size();
}

double TopoGraph::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      best = std::min(best, distance_cells(nodes[i], nodes[j]));
    }
  }
  return best;
}

int TopoGraph::nearest_node(Cell c, const GridMap& map) const {
  const int idx = map.index(c);
  int best = -1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const int s = steps[i][idx];
    if (s >= 0 && (best < 0 || s < steps[best][idx])) best = static_cast<int>(i);
  }
  return best;
}

double captured_mass(const TopoGraph& g, const GridMap& map, const std::vector<double>& b_target,
                     double radius) {
  const double r_cells = radius / map.cell_size() + kTol;
  double total = 0.0;
  for (std::size_t i = 0; i < b_target.size(); ++i) {
    if (b_target[i] <= 0.0) continue;
    const Cell c = map.cell(static_cast<int>(i));
    for (const Cell& n : g.nodes) {
      if (distance_cells(c, n) <= r_cells) {
        total += b_target[i];
        break;
      }
    }
  }
  return total;
}

TopoGraph sample_topo_graph(const GridMap& map, const PlaceProjection& proj,
                            const std::vector<double>& b_target, const HierParams& params,
                            Rng& rng) {
  params.validate();
  const std::vector<int>& places = proj.reachable();
  if (places.empty()) throw std::invalid_argument("no reachable cells to place graph nodes on");
  const std::vector<double> p = proj.project(b_target);
  const double sep_cells = params.d_sep / map.cell_size() - kTol;
  const auto max_nodes = static_cast<std::size_t>(params.max_nodes);

  std::vector<int> accepted;
  auto separated = [&](int idx) {
    const Cell c = map.cell(idx);
    return std::all_of(accepted.begin(), accepted.end(),
                       [&](int a) { return distance_cells(c, map.cell(a)) >= sep_cells; });
  };

  std::vector<double> cdf;
  cdf.reserve(places.size());
  double acc = 0.0;
  for (int idx : places) {
    acc += p[idx];
    cdf.push_back(acc);
  }
  if (acc > 0.0) {
    for (int k = 0; k < 50 * params.max_nodes && accepted.size() < max_nodes; ++k) {
      const double u = uniform01(rng) * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      if (it == cdf.end()) --it;
      const int cand = places[static_cast<std::size_t>(it - cdf.begin())];
      if (separated(cand)) accepted.push_back(cand);
    }
  }
  if (accepted.empty()) {
    int best = places.front();
    for (int idx : places) {
      if (p[idx] > p[best]) best = idx;
    }
    accepted.push_back(best);
  }
  while (accepted.size() < max_nodes) {
    int best = -1;
    double best_d = -1.0;
    for (int idx : places) {
      double d = std::numeric_limits<double>::infinity();
      for (int a : accepted) d = std::min(d, distance_cells(map.cell(idx), map.cell(a)));
      if (d > best_d) {
        best_d = d;
        best = idx;
      }
    }
    if (best < 0 || best_d < sep_cells) break;
    accepted.push_back(best);
  }

  TopoGraph g;
  const int n = static_cast<int>(accepted.size());
  for (int idx : accepted) {
    g.nodes.push_back(map.cell(idx));
    g.steps.push_back(bfs_steps(map, map.cell(idx)));
  }
  g.adjacency.assign(n, {});

  struct Candidate {
    int steps;
    int u;
    int v;
  };
  std::vector<Candidate> pairs;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      pairs.push_back({g.steps[u][accepted[v]], u, v});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.steps, a.u, a.v) < std::tie(b.steps, b.u, b.v);
  });

  auto linked = [&](int u, int v) {
    return std::binary_search(g.adjacency[u].begin(), g.adjacency[u].end(), v);
  };
  auto link = [&](int u, int v) {
    g.adjacency[u].insert(std::upper_bound(g.adjacency[u].begin(), g.adjacency[u].end(), v), v);
    g.adjacency[v].insert(std::upper_bound(g.adjacency[v].begin(), g.adjacency[v].end(), u), u);
  };

  DisjointSets sets(static_cast<std::size_t>(n));
  int components = n;
  for (bool capped : {true, false}) {
    for (const Candidate& c : pairs) {
      if (components == 1) break;
      if (capped && (g.degree(c.u) >= params.deg_max || g.degree(c.v) >= params.deg_max)) continue;
      if (sets.unite(c.u, c.v)) {
        link(c.u, c.v);
        --components;
      }
    }
  }

  const int need = std::min(params.deg_min, n - 1);
  for (int u = 0; u < n; ++u) {
    for (bool capped : {true, false}) {
      for (const Candidate& c : pairs) {
        if (g.degree(u) >= need) break;
        if (c.u != u && c.v != u) continue;
        const int v = c.u == u ? c.v : c.u;
        if (linked(u, v)) continue;
        if (capped && g.degree(v) >= params.deg_max) continue;
        link(u, v);
      }
    }
  }

  for (int u = 0; u < n; ++u) {
    for (int v : g.adjacency[u]) {
      if (u < v) g.edges.push_back({u, v, g.steps[u][accepted[v]] * map.cell_size()});
    }
  }

  g.node_mass.assign(n, 0.0);
  const double r_cells = params.d_sep / map.cell_size() + kTol;
  for (std::size_t i = 0; i < b_target.size(); ++i) {
    if (b_target[i] <= 0.0) continue;
    const Cell c = map.cell(static_cast<int>(i));
    int best = 0;
    for (int u = 1; u < n; ++u) {
      if (distance_sq(c, g.nodes[u]) < distance_sq(c, g.nodes[best])) best = u;
    }
    if (distance_cells(c, g.nodes[best]) <= r_cells) g.node_mass[best] += b_target[i];
  }
  return g;
}

// ---------------------------------------------------------------------------

std::string to_string(const Subgoal& g, const TopoGraph& graph) {
  switch (g.kind) {
    case Subgoal::Kind::NavigateTo: {
      const Cell c = graph.nodes.at(g.node);
      return fmt::format("NavigateTo({}@{},{})", g.node, c.col, c.row);
    }
    case Subgoal::Kind::SearchLocal:
      return "SearchLocal";
    case Subgoal::Kind::Done:
      return "Done";
  }
  return "?";
}

std::vector<Subgoal> HighLevelModel::actions(const CosState& s) const {
  std::vector<Subgoal> out;
  const int place = graph_->nearest_node(s.robot.cell, model_->map());
  if (place >= 0) {
    std::vector<int> targets = graph_->adjacency[place];
    if (graph_->nodes[place] != s.robot.cell) targets.push_back(place);
    std::sort(targets.begin(), targets.end());
    for (int v : targets) out.push_back(Subgoal::navigate(v));
  }
  out.push_back(Subgoal::search_local());
  out.push_back(Subgoal::done());
  return out;
}

Transition<CosState> HighLevelModel::transition(const CosState& s, const Subgoal& a, Rng&) const {
  Transition<CosState> tr{s, 0.0, false, 1};
  switch (a.kind) {
    case Subgoal::Kind::NavigateTo: {
      const Cell dest = graph_->nodes[a.node];
      const int steps = graph_->steps[a.node][model_->map().index(s.robot.cell)];
      const int len = std::max(1, steps);
      tr.state.robot = {dest, heading_towards(dest, s.target, s.robot.heading)};
      tr.reward = kStepCost * (1.0 - std::pow(discount_, len)) / (1.0 - discount_);
      tr.duration = len;
      break;
    }
    case Subgoal::Kind::SearchLocal:
      tr.state.robot.heading = heading_towards(s.robot.cell, s.target, s.robot.heading);
      tr.reward = kStepCost;
      break;
    case Subgoal::Kind::Done:
      tr.reward = reward(s, cospomdp::Action::Done, *model_);
      tr.terminal = true;
      break;
  }
  return tr;
}

JointObservation HighLevelModel::observe(const CosState& next, const Subgoal&, Rng& rng) const {
  return model_->sample_observation(next.robot, next.target, rng);
}

std::vector<Subgoal> HighLevelModel::rollout_actions(const CosState& s) const {
  std::vector<Subgoal> out;
  const int here = distance_sq(s.robot.cell, s.target);
  for (const Subgoal& a : actions(s)) {
    if (a.kind == Subgoal::Kind::NavigateTo) {
      if (distance_sq(graph_->nodes[a.node], s.target) < here) out.push_back(a);
    } else if (a.kind == Subgoal::Kind::SearchLocal) {
      out.push_back(a);
    }
  }
  return out;
}

PlanResult<Subgoal> high_level_plan(const TopoGraph& graph, const CosBelief& belief,
                                    const CosModel& model, const PlannerParams& params, Rng& rng) {
  const HighLevelModel hl(model, graph, params.discount);
  return plan(belief, hl, params, rng);
}

// ---------------------------------------------------------------------------

NavResult astar(const GridMap& map, const Pose& from, Cell goal, std::optional<int> goal_heading) {
  auto is_goal = [&](const Pose& p) {
    return p.cell == goal && (!goal_heading || p.heading == *goal_heading);
  };
  NavResult out;
  if (is_goal(from)) {
    out.status = NavStatus::Arrived;
    return out;
  }
  if (!map.is_free(goal)) return out;

  auto h = [&](Cell c) { return std::max(std::abs(c.col - goal.col), std::abs(c.row - goal.row)); };
  auto key = [&](const Pose& p) { return map.index(p.cell) * kNumHeadings + p.heading; };
  const std::size_t n = static_cast<std::size_t>(map.num_cells()) * kNumHeadings;
  std::vector<int> g(n, std::numeric_limits<int>::max());
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> via(n, 0);
  std::vector<char> closed(n, 0);

  // (f, sequence, state); the sequence number makes ties deterministic.
  using Entry = std::tuple<int, std::uint64_t, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::uint64_t seq = 0;
  const int start = key(from);
  g[start] = 0;
  open.emplace(h(from.cell), seq++, start);
  int found = -1;
  while (!open.empty()) {
    const auto [f, order, k] = open.top();
    open.pop();
    if (closed[k]) continue;
    closed[k] = 1;
    const Pose p{map.cell(k / kNumHeadings), k % kNumHeadings};
    if (is_goal(p)) {
      found = k;
      break;
    }
    for (MoveAction a : kMoveActions) {
      const Pose q = apply_move(p, a, map);
      const int kq = key(q);
      if (kq == k || closed[kq] || g[k] + 1 >= g[kq]) continue;
      g[kq] = g[k] + 1;
      parent[kq] = k;
      via[kq] = static_cast<std::uint8_t>(a);
      open.emplace(g[kq] + h(q.cell), seq++, kq);
    }
  }
  if (found < 0) return out;
  for (int k = found; k != start; k = parent[k]) {
    out.plan.push_back(static_cast<MoveAction>(via[k]));
  }
  std::reverse(out.plan.begin(), out.plan.end());
  out.status = NavStatus::Step;
  out.action = out.plan.front();
  return out;
}

}  // namespace cospomdp
