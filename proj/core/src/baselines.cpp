#include "cospomdp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace cospomdp {

RandomAgent::RandomAgent(const GridMap& map)
    : uniform_(CosBelief::uniform(map, Pose{}).target_dist) {}

Action RandomAgent::act(const std::optional<JointObservation>&, Rng& rng) {
  return kAllActions[uniform_index(rng, std::size(kAllActions))];
}

// ---------------------------------------------------------------------------

namespace {

void draw_prior(const CosModel& model, int* out, Rng& rng) {
  const GridMap& m = model.map();
  const auto& free = m.free_cells();
  const Cell t = free[uniform_index(rng, free.size())];
  out[0] = m.index(t);
  for (std::size_t i = 0; i < model.correlated().size(); ++i) {
    out[i + 1] = m.index(model.correlated()[i].correlation->sample(t, m, rng));
  }
}

const DetectionModel& detector(const CosModel& model, std::size_t k) {
  return k == 0 ? model.target_detector() : *model.correlated()[k - 1].detector;
}

}  // namespace

ParticleBelief ParticleBelief::from_prior(const CosModel& model, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("particle count must be positive");
  ParticleBelief pb;
  pb.num_classes = model.num_classes();
  pb.particles.resize(n * pb.num_classes);
  pb.weights.assign(n, 1.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) draw_prior(model, pb.particles.data() + k * pb.num_classes, rng);
  return pb;
}

double ParticleBelief::effective_size() const {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

std::vector<double> ParticleBelief::target_marginal(const GridMap& map) const {
  std::vector<double> out(map.num_cells(), 0.0);
  for (std::size_t k = 0; k < size(); ++k) out[particle(k)[0]] += weights[k];
  return out;
}

void particle_update(ParticleBelief& pb, const JointObservation& z, const CosModel& model,
                     double reinvigoration, Rng& rng) {
  if (z.detections.size() < pb.num_classes) {
    throw std::invalid_argument("observation has fewer detections than particle classes");
  }
  const GridMap& m = model.map();
  const std::size_t n = pb.size();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const int* x = pb.particle(k);
    double w = pb.weights[k];
    for (std::size_t c = 0; c < pb.num_classes && w > 0.0; ++c) {
      const auto& v = z.detections[c].value;
      w *= detector(model, c).likelihood(v ? m.index(*v) : -1, x[c], z.robot_pose);
    }
    pb.weights[k] = w;
    total += w;
  }
  if (!(total > 0.0)) {
    spdlog::warn("particle belief depleted; reinitializing from the prior");
    pb = ParticleBelief::from_prior(model, n, rng);
    return;
  }
  for (double& w : pb.weights) w /= total;
  if (pb.effective_size() >= 0.5 * static_cast<double>(n)) return;

  std::vector<int> next(pb.particles.size());
  const double step = 1.0 / static_cast<double>(n);
  double u = uniform01(rng) * step;
  double acc = pb.weights[0];
  std::size_t src = 0;
  for (std::size_t k = 0; k < n; ++k) {
    while (u > acc && src + 1 < n) acc += pb.weights[++src];
    std::copy_n(pb.particle(src), pb.num_classes, next.data() + k * pb.num_classes);
    u += step;
  }
  pb.particles = std::move(next);
  const auto fresh = static_cast<std::size_t>(std::floor(reinvigoration * static_cast<double>(n)));
  for (std::size_t r = 0; r < fresh; ++r) {
    draw_prior(model, pb.particles.data() + uniform_index(rng, n) * pb.num_classes, rng);
  }
  pb.weights.assign(n, step);
}

double detect_any_probability(const ParticleBelief& pb, const Pose& pose, const CosModel& model) {
  double p = 0.0;
  for (std::size_t k = 0; k < pb.size(); ++k) {
    const int* x = pb.particle(k);
    double none = 1.0;
    for (std::size_t c = 0; c < pb.num_classes; ++c) {
      none *= detector(model, c).null_probability(x[c], pose);
    }
    p += pb.weights[k] * (1.0 - none);
  }
  return p;
}

// ---------------------------------------------------------------------------

GreedyNbvAgent::GreedyNbvAgent(CosModel model, const Pose& init, GreedyParams params,
                               HierParams graph_params, Rng& rng)
    : model_(std::move(model)),
      params_(params),
      graph_params_(graph_params),
      projection_(model_.map(), init.cell),
      pose_(init) {
  params_.validate();
  graph_params_.validate();
  particles_ = ParticleBelief::from_prior(model_, static_cast<std::size_t>(params_.num_particles), rng);
}

std::vector<double> GreedyNbvAgent::target_belief() const {
  return particles_.target_marginal(model_.map());
}

std::string GreedyNbvAgent::subgoal() const {
  if (!goal_) return {};
  return fmt::format("View({},{},{})", goal_->cell.col, goal_->cell.row, goal_->heading);
}

Pose GreedyNbvAgent::choose_view(const Pose& pose, const std::vector<Pose>& views,
                                 const std::vector<double>& path_meters) const {
  std::optional<Pose> best;
  double best_u = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i] == pose) continue;
    const double u =
        detect_any_probability(particles_, views[i], model_) - params_.lambda * path_meters[i];
    if (u > best_u) {
      best_u = u;
      best = views[i];
    }
  }
  if (!best) throw std::logic_error("no candidate viewpoint other than the current pose");
  return *best;
}

void GreedyNbvAgent::commit(Rng& rng) {
  const GridMap& m = model_.map();
  const TopoGraph g = sample_topo_graph(m, projection_, target_belief(), graph_params_, rng);
  std::vector<Pose> views;
  std::vector<double> meters;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double d = g.steps[i][m.index(pose_.cell)] * m.cell_size();
    for (int h = 0; h < kNumHeadings; ++h) {
      views.push_back({g.nodes[i], h});
      meters.push_back(d);
    }
  }
  goal_ = choose_view(pose_, views, meters);
}

Action GreedyNbvAgent::act(const std::optional<JointObservation>& z, Rng& rng) {
  if (z) {
    pose_ = z->robot_pose;
    particle_update(particles_, *z, model_, params_.reinvigoration, rng);
  }
  const GridMap& m = model_.map();
  const std::vector<double> marginal = target_belief();
  std::size_t mode = 0;
  for (std::size_t i = 1; i < marginal.size(); ++i) {
    if (marginal[i] > marginal[mode]) mode = i;
  }
  if (success_check(pose_, m.cell(static_cast<int>(mode)), m, model_.success_distance())) {
    return Action::Done;
  }
  for (int attempt = 0; attempt < 2; ++attempt) {
    if (!goal_) commit(rng);
    const NavResult nav = astar(m, pose_, goal_->cell, goal_->heading);
    if (nav.status == NavStatus::Step) return to_action(nav.action);
    goal_.reset();
  }
  return Action::RotateLeft;
}

}  // namespace cospomdp
