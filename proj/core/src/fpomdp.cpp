#include "cospomdp/fpomdp.hpp"

#include <stdexcept>

#include <spdlog/spdlog.h>

namespace cospomdp {

namespace {

std::size_t checked_size(std::size_t domain, std::size_t coords, std::size_t cap) {
  std::size_t n = 1;
  for (std::size_t k = 0; k < coords; ++k) {
    if (domain != 0 && n > cap / domain) {
      throw std::length_error("dense joint belief exceeds the configured cap");
    }
    n *= domain;
  }
  if (n > cap) throw std::length_error("dense joint belief exceeds the configured cap");
  return n;
}

}  // namespace

std::size_t FBelief::index(std::size_t target_slot,
                           const std::vector<std::size_t>& object_slots) const {
  std::size_t idx = 0;
  for (std::size_t k = object_slots.size(); k-- > 0;) {
    idx = idx * domain.size() + object_slots[k];
  }
  return idx * domain.size() + target_slot;
}

double FBelief::total() const {
  double s = 0.0;
  for (double p : joint) s += p;
  return s;
}

FBelief FBelief::from_cos(const CosBelief& b, const CosModel& model, std::size_t cap) {
  const GridMap& m = model.map();
  FBelief f;
  f.robot = b.robot;
  for (const Cell& c : m.free_cells()) f.domain.push_back(m.index(c));
  f.num_objects = model.correlated().size();
  const std::size_t d = f.domain.size();
  f.joint.assign(checked_size(d, f.num_objects + 1, cap), 0.0);
  for (std::size_t flat = 0; flat < f.joint.size(); ++flat) {
    std::size_t rest = flat;
    const std::size_t t = rest % d;
    rest /= d;
    const Cell tc = m.cell(f.domain[t]);
    double p = b.target_dist[f.domain[t]];
    for (std::size_t i = 0; i < f.num_objects && p > 0.0; ++i) {
      const std::size_t xi = rest % d;
      rest /= d;
      p *= model.correlated()[i].correlation->probability(m.cell(f.domain[xi]), tc, m);
    }
    f.joint[flat] = p;
  }
  return f;
}

FBelief fpomdp_update(const FBelief& b, Action /*a*/, const JointObservation& z,
                      const CosModel& model) {
  if (z.detections.size() != b.num_objects + 1 || model.correlated().size() != b.num_objects) {
    throw std::invalid_argument("observation does not match the joint belief's objects");
  }
  const GridMap& m = model.map();
  const std::size_t d = b.domain.size();
  // Per-class likelihood over the domain: lik[k][slot].
  std::vector<std::vector<double>> lik(b.num_objects + 1, std::vector<double>(d));
  for (std::size_t k = 0; k <= b.num_objects; ++k) {
    const DetectionModel& det =
        k == 0 ? model.target_detector() : *model.correlated()[k - 1].detector;
    const int zc = z.detections[k].value ? m.index(*z.detections[k].value) : -1;
    for (std::size_t s = 0; s < d; ++s) {
      lik[k][s] = det.likelihood(zc, b.domain[s], z.robot_pose);
    }
  }
  FBelief out = b;
  out.robot = z.robot_pose;
  double total = 0.0;
  for (std::size_t flat = 0; flat < out.joint.size(); ++flat) {
    if (out.joint[flat] == 0.0) continue;
    std::size_t rest = flat;
    double w = lik[0][rest % d];
    rest /= d;
    for (std::size_t i = 1; i <= b.num_objects; ++i) {
      w *= lik[i][rest % d];
      rest /= d;
    }
    out.joint[flat] *= w;
    total += out.joint[flat];
  }
  if (!(total > 0.0)) {
    spdlog::warn("observation has zero probability under the joint belief; resetting to uniform");
    const double u = 1.0 / static_cast<double>(out.joint.size());
    for (double& p : out.joint) p = u;
    return out;
  }
  for (double& p : out.joint) p /= total;
  return out;
}

std::vector<double> marginal_target(const FBelief& b, const GridMap& map) {
  std::vector<double> out(map.num_cells(), 0.0);
  const std::size_t d = b.domain.size();
  for (std::size_t flat = 0; flat < b.joint.size(); ++flat) {
    out[b.domain[flat % d]] += b.joint[flat];
  }
  return out;
}

}  // namespace cospomdp
