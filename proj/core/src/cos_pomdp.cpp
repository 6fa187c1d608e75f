#include "cospomdp/cos_pomdp.hpp"

#include <cstring>
#include <stdexcept>

#include <spdlog/spdlog.h>

namespace cospomdp {

namespace {

int cell_or_null(const GridMap& map, const Detection& d) {
  return d.value ? map.index(*d.value) : -1;
}

double correlational_at(int z, Cell target, const Pose& pose, const CorrelatedObject& obj) {
  const DetectionModel& det = *obj.detector;
  const GridMap& m = det.map();
  const int support = obj.correlation->support_size(m.index(target));
  if (support == 0) {
    throw std::domain_error("correlation support is empty for the target cell");
  }
  double sum = 0.0;
  int inside = 0;
  for (int v : det.visibility().visible(pose)) {
    if (obj.correlation->related(m.cell(v), target)) {
      sum += det.likelihood(z, v, pose);
      ++inside;
    }
  }
  return (sum + (support - inside) * det.likelihood_out_of_view(z, pose)) / support;
}

}  // namespace

std::string_view to_string(Action a) {
  switch (a) {
    case Action::MoveAhead:
      return "MoveAhead";
    case Action::RotateLeft:
      return "RotateLeft";
    case Action::RotateRight:
      return "RotateRight";
    case Action::Done:
      return "Done";
  }
  return "?";
}

std::optional<Action> action_from_string(std::string_view s) {
  for (Action a : kAllActions) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

std::optional<MoveAction> as_move(Action a) {
  switch (a) {
    case Action::MoveAhead:
      return MoveAction::MoveAhead;
    case Action::RotateLeft:
      return MoveAction::RotateLeft;
    case Action::RotateRight:
      return MoveAction::RotateRight;
    case Action::Done:
      return std::nullopt;
  }
  return std::nullopt;
}

Action to_action(MoveAction m) {
  switch (m) {
    case MoveAction::MoveAhead:
      return Action::MoveAhead;
    case MoveAction::RotateLeft:
      return Action::RotateLeft;
    case MoveAction::RotateRight:
      return Action::RotateRight;
  }
  return Action::MoveAhead;
}

// ---------------------------------------------------------------------------

CosModel::CosModel(std::shared_ptr<const VisibilityMap> visibility, std::string target_name,
                   std::shared_ptr<const DetectionModel> target_detector,
                   std::vector<CorrelatedObject> correlated, double success_distance)
    : vis_(std::move(visibility)),
      target_name_(std::move(target_name)),
      target_(std::move(target_detector)),
      correlated_(std::move(correlated)),
      success_distance_(success_distance) {}

CosModel CosModel::target_only() const {
  return CosModel(vis_, target_name_, target_, {}, success_distance_);
}

JointObservation CosModel::sample_observation(const Pose& pose, Cell target, Rng& rng) const {
  const GridMap& m = map();
  JointObservation z{pose, {}};
  z.detections.reserve(num_classes());
  const int zt = target_->sample(m.index(target), pose, rng);
  z.detections.push_back({0, zt < 0 ? std::nullopt : std::optional<Cell>(m.cell(zt))});
  for (std::size_t i = 0; i < correlated_.size(); ++i) {
    const Cell xi = correlated_[i].correlation->sample(target, m, rng);
    const int zi = correlated_[i].detector->sample(m.index(xi), pose, rng);
    z.detections.push_back({static_cast<std::uint16_t>(i + 1),
                            zi < 0 ? std::nullopt : std::optional<Cell>(m.cell(zi))});
  }
  return z;
}

JointObservation CosModel::project(const JointObservation& z) const {
  if (z.detections.size() < num_classes()) {
    throw std::invalid_argument("observation has fewer detections than modeled classes");
  }
  JointObservation out{z.robot_pose, {}};
  out.detections.assign(z.detections.begin(),
                        z.detections.begin() + static_cast<std::ptrdiff_t>(num_classes()));
  return out;
}

std::vector<double> CosModel::observation_likelihoods(const JointObservation& z) const {
  if (z.detections.size() != num_classes()) {
    throw std::invalid_argument("observation does not match the modeled class list");
  }
  const GridMap& m = map();
  const Pose& pose = z.robot_pose;
  std::vector<double> out(m.num_cells(), 0.0);
  const int zt = cell_or_null(m, z.detections[0]);
  const double out_of_view = target_->likelihood_out_of_view(zt, pose);
  for (const Cell& c : m.free_cells()) {
    out[m.index(c)] = out_of_view;
  }
  for (int v : vis_->visible(pose)) {
    out[v] = target_->likelihood(zt, v, pose);
  }
  for (std::size_t i = 0; i < correlated_.size(); ++i) {
    const int zi = cell_or_null(m, z.detections[i + 1]);
    const std::vector<double> li =
        correlational_likelihoods(zi, pose, *correlated_[i].detector, *correlated_[i].correlation);
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] *= li[k];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

ScenarioResources::ScenarioResources(ScenarioSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  vis_ = std::make_shared<const VisibilityMap>(spec_.map);
  target_ = std::make_shared<const DetectionModel>(vis_, spec_.target.detector);
  for (const ObjectSpec& o : spec_.objects) {
    objects_.push_back(std::make_shared<const DetectionModel>(vis_, o.detector));
    accurate_.push_back(std::make_shared<const CorrelationModel>(spec_.map, o.correlation));
    wrong_.push_back(std::make_shared<const CorrelationModel>(spec_.map, o.correlation.flipped()));
  }
}

CosModel ScenarioResources::model(Ablation ablation) const {
  std::vector<CorrelatedObject> correlated;
  for (std::size_t i = 0; i < spec_.objects.size(); ++i) {
    const auto& corr = ablation == Ablation::Wrong ? wrong_[i] : accurate_[i];
    if (!corr->well_formed(spec_.map)) {
      throw std::invalid_argument("correlation support is empty under the requested ablation");
    }
    correlated.push_back({spec_.objects[i].cls, objects_[i], corr});
  }
  return CosModel(vis_, spec_.target.cls, target_, std::move(correlated), spec_.success_distance);
}

// ---------------------------------------------------------------------------

CosBelief CosBelief::uniform(const GridMap& map, const Pose& robot) {
  CosBelief b{robot, std::vector<double>(map.num_cells(), 0.0), 0};
  const double p = 1.0 / static_cast<double>(map.free_cells().size());
  for (const Cell& c : map.free_cells()) {
    b.target_dist[map.index(c)] = p;
  }
  return b;
}

Cell CosBelief::sample_target(const GridMap& map, Rng& rng) const {
  const double u = uniform01(rng) * total();
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < target_dist.size(); ++i) {
    if (target_dist[i] <= 0.0) continue;
    last = static_cast<int>(i);
    acc += target_dist[i];
    if (u < acc) return map.cell(static_cast<int>(i));
  }
  if (last < 0) throw std::logic_error("sampling from an empty belief");
  return map.cell(last);
}

Cell CosBelief::mode(const GridMap& map) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < target_dist.size(); ++i) {
    if (target_dist[i] > target_dist[best]) best = i;
  }
  return map.cell(static_cast<int>(best));
}

double CosBelief::total() const {
  double s = 0.0;
  for (double p : target_dist) s += p;
  return s;
}

std::uint64_t CosBelief::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  feed(&robot.cell.col, sizeof(int));
  feed(&robot.cell.row, sizeof(int));
  feed(&robot.heading, sizeof(int));
  for (double p : target_dist) {
    std::uint64_t bits;
    std::memcpy(&bits, &p, sizeof bits);
    feed(&bits, sizeof bits);
  }
  return h;
}

double joint_observation_likelihood(const JointObservation& z, const CosState& s,
                                    const CosModel& model) {
  if (z.detections.size() != model.num_classes()) {
    throw std::invalid_argument("observation does not match the modeled class list");
  }
  const GridMap& m = model.map();
  const Pose& pose = z.robot_pose;
  double p = model.target_detector().likelihood(cell_or_null(m, z.detections[0]),
                                                m.index(s.target), pose);
  for (std::size_t i = 0; i < model.correlated().size(); ++i) {
    p *= correlational_at(cell_or_null(m, z.detections[i + 1]), s.target, pose,
                          model.correlated()[i]);
  }
  return p;
}

CosBelief belief_update(const CosBelief& b, Action /*a*/, const JointObservation& z,
                        const CosModel& model) {
  const std::vector<double> lik = model.observation_likelihoods(z);
  CosBelief out{z.robot_pose, std::vector<double>(b.target_dist.size(), 0.0), b.resets};
  double total = 0.0;
  for (std::size_t i = 0; i < lik.size(); ++i) {
    out.target_dist[i] = b.target_dist[i] * lik[i];
    total += out.target_dist[i];
  }
  if (!(total > 0.0)) {
    spdlog::warn("observation has zero probability under the belief; resetting to uniform");
    CosBelief reset = CosBelief::uniform(model.map(), z.robot_pose);
    reset.resets = b.resets + 1;
    return reset;
  }
  for (double& p : out.target_dist) p /= total;
  return out;
}

double reward(const CosState& s, Action a, const CosModel& model) {
  if (a != Action::Done) {
    return kStepCost;
  }
  return success_check(s.robot, s.target, model.map(), model.success_distance()) ? kRewardMax
                                                                                 : kRewardMin;
}

}  // namespace cospomdp
