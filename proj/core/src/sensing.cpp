#include "cospomdp/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cospomdp {

namespace {

constexpr double kBoundaryEps = 1e-9;

struct DirectFrame {
  std::vector<Cell> visible;
  int range_count = 0;  // |V_E(r)|
};

DirectFrame direct_frame(const Pose& pose, const DetectorParams& p, const GridMap& map) {
  DirectFrame f;
  f.visible = visible_cells(pose, map);
  for (const Cell& c : f.visible) {
    if (distance_cells(c, pose.cell) * map.cell_size() <= p.r + kBoundaryEps) {
      ++f.range_count;
    }
  }
  return f;
}

double direct_delta(Cell z, const Pose& pose, const DetectorParams& p, const GridMap& map) {
  const double dist = distance_cells(z, pose.cell) * map.cell_size();
  if (dist <= p.r + kBoundaryEps) {
    return 1.0;
  }
  return std::exp(-(dist - p.r) * (dist - p.r));
}

bool direct_in_disk(Cell a, Cell b, const DetectorParams& p, const GridMap& map) {
  return distance_cells(a, b) * map.cell_size() <= 3.0 * p.sigma + kBoundaryEps;
}

double direct_gauss(Cell a, Cell b, const DetectorParams& p, const GridMap& map) {
  const double d = distance_cells(a, b) * map.cell_size();
  return std::exp(-d * d / (2.0 * p.sigma * p.sigma));
}

double direct_score(const Detection& z, Cell x, const Pose& pose, const DetectorParams& p,
                    const GridMap& map, const DirectFrame& f) {
  const bool x_in = std::binary_search(f.visible.begin(), f.visible.end(), x,
                                       [&](Cell a, Cell b) { return map.index(a) < map.index(b); });
  if (!z.value) {
    if (x_in) {
      return 1.0 - p.tp;
    }
    return f.range_count > 0 ? 1.0 - p.fp : 1.0;
  }
  const Cell zc = *z.value;
  if (std::find(f.visible.begin(), f.visible.end(), zc) == f.visible.end()) {
    return 0.0;
  }
  const double delta = direct_delta(zc, pose, p, map);
  if (x_in && direct_in_disk(zc, x, p, map)) {
    double norm = 0.0;
    for (const Cell& c : f.visible) {
      if (direct_in_disk(c, x, p, map)) {
        norm += direct_gauss(c, x, p, map);
      }
    }
    return delta * p.tp * direct_gauss(zc, x, p, map) / norm;
  }
  if (f.range_count == 0) {
    return 0.0;
  }
  return delta * p.fp / f.range_count;
}

}  // namespace

void DetectorParams::validate() const {
  if (!(tp >= 0.0 && tp <= 1.0)) throw std::invalid_argument("detector tp must lie in [0, 1]");
  if (!(fp >= 0.0 && fp <= 1.0)) throw std::invalid_argument("detector fp must lie in [0, 1]");
  if (!(r > 0.0)) throw std::invalid_argument("detector range r must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("detector sigma must be positive");
}

std::string_view to_string(Relation r) { return r == Relation::Close ? "close" : "far"; }

void CorrelationSpec::validate() const {
  if (!(d > 0.0)) throw std::invalid_argument("correlation distance d must be positive");
}

double detection_score(const Detection& z, Cell x_i, const Pose& pose,
                       const DetectorParams& params, const GridMap& map) {
  return direct_score(z, x_i, pose, params, map, direct_frame(pose, params, map));
}

double detection_likelihood(const Detection& z, Cell x_i, const Pose& pose,
                            const DetectorParams& params, const GridMap& map) {
  const DirectFrame f = direct_frame(pose, params, map);
  const double w = direct_score(z, x_i, pose, params, map, f);
  if (w == 0.0) {
    return 0.0;
  }
  double total = direct_score(Detection{z.object, std::nullopt}, x_i, pose, params, map, f);
  for (const Cell& c : f.visible) {
    total += direct_score(Detection{z.object, c}, x_i, pose, params, map, f);
  }
  return w / total;
}

Detection sample_detection(std::uint16_t object, Cell x_i, const Pose& pose,
                           const DetectorParams& params, const GridMap& map, Rng& rng) {
  const DirectFrame f = direct_frame(pose, params, map);
  std::vector<double> weights;
  weights.reserve(f.visible.size() + 1);
  weights.push_back(direct_score(Detection{object, std::nullopt}, x_i, pose, params, map, f));
  for (const Cell& c : f.visible) {
    weights.push_back(direct_score(Detection{object, c}, x_i, pose, params, map, f));
  }
  double total = 0.0;
  for (double w : weights) total += w;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) {
      return k == 0 ? Detection{object, std::nullopt} : Detection{object, f.visible[k - 1]};
    }
  }
  // Rounding at the top of the cumulative sum: take the last nonzero outcome.
  for (std::size_t k = weights.size(); k-- > 0;) {
    if (weights[k] > 0.0) {
      return k == 0 ? Detection{object, std::nullopt} : Detection{object, f.visible[k - 1]};
    }
  }
  return Detection{object, std::nullopt};
}

int correlation_prob(Cell x_i, Cell x_target, const CorrelationSpec& spec, double cell_size) {
  const double dist = distance_cells(x_i, x_target) * cell_size;
  if (spec.relation == Relation::Close) {
    return dist < spec.d - kBoundaryEps ? 1 : 0;
  }
  return dist > spec.d + kBoundaryEps ? 1 : 0;
}

double correlational_likelihood(const Detection& z, Cell x_target, const Pose& pose,
                                const DetectorParams& det, const CorrelationSpec& corr,
                                const GridMap& map) {
  int support = 0;
  for (const Cell& x : map.free_cells()) {
    support += correlation_prob(x, x_target, corr, map.cell_size());
  }
  if (support == 0) {
    throw std::domain_error("correlation support is empty for the target cell");
  }
  double sum = 0.0;
  for (const Cell& x : map.free_cells()) {
    if (correlation_prob(x, x_target, corr, map.cell_size()) == 1) {
      sum += detection_likelihood(z, x, pose, det, map);
    }
  }
  return sum / support;
}

// ---------------------------------------------------------------------------

DetectionModel::DetectionModel(std::shared_ptr<const VisibilityMap> visibility,
                               DetectorParams params)
    : vis_(std::move(visibility)), params_(params) {
  params_.validate();
  const GridMap& m = vis_->map();
  const double radius_cells = 3.0 * params_.sigma / m.cell_size();
  disk_radius_sq_ = radius_cells * radius_cells;
  const int reach = static_cast<int>(std::floor(radius_cells + kBoundaryEps));
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if (in_disk({0, 0}, {dc, dr})) {
        disk_.push_back({dc, dr, gaussian({0, 0}, {dc, dr})});
      }
    }
  }
  const std::size_t poses = static_cast<std::size_t>(m.num_cells()) * kNumHeadings;
  frames_.resize(poses);
  once_ = std::make_unique<std::once_flag[]>(poses);
}

bool DetectionModel::in_disk(Cell a, Cell b) const {
  const GridMap& m = vis_->map();
  return distance_cells(a, b) * m.cell_size() <= 3.0 * params_.sigma + kBoundaryEps;
}

double DetectionModel::gaussian(Cell a, Cell b) const {
  const double d = distance_cells(a, b) * vis_->map().cell_size();
  return std::exp(-d * d / (2.0 * params_.sigma * params_.sigma));
}

int DetectionModel::slot(const Frame& f, int cell) const {
  const auto it = std::lower_bound(f.visible.begin(), f.visible.end(), cell);
  if (it == f.visible.end() || *it != cell) {
    return -1;
  }
  return static_cast<int>(it - f.visible.begin());
}

const DetectionModel::Frame& DetectionModel::frame(const Pose& pose) const {
  const int pi = vis_->pose_index(pose);
  std::call_once(once_[pi], [&] { frames_[pi] = build_frame(pose); });
  return frames_[pi];
}

DetectionModel::Frame DetectionModel::build_frame(const Pose& pose) const {
  const GridMap& m = vis_->map();
  const auto vis = vis_->visible(pose);
  Frame f;
  f.visible.assign(vis.begin(), vis.end());
  const std::size_t n = f.visible.size();
  f.delta.resize(n);
  f.delta_cdf.resize(n);
  int range_count = 0;
  double delta_sum = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double dist = distance_cells(m.cell(f.visible[s]), pose.cell) * m.cell_size();
    if (dist <= params_.r + kBoundaryEps) {
      f.delta[s] = 1.0;
      ++range_count;
    } else {
      f.delta[s] = std::exp(-(dist - params_.r) * (dist - params_.r));
    }
    delta_sum += f.delta[s];
    f.delta_cdf[s] = delta_sum;
  }
  f.fp_scale = range_count > 0 ? params_.fp / range_count : 0.0;
  f.out_null = range_count > 0 ? 1.0 - params_.fp : 1.0;
  f.out_norm = f.out_null + f.fp_scale * delta_sum;

  f.in_norm.resize(n);
  f.gauss_norm.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Cell x = m.cell(f.visible[s]);
    double g_sum = 0.0;
    double dg_sum = 0.0;
    double d_sum = 0.0;
    for (const DiskOffset& o : disk_) {
      const Cell z{x.col + o.dc, x.row + o.dr};
      if (!m.in_bounds(z)) continue;
      const int sz = slot(f, m.index(z));
      if (sz < 0) continue;
      g_sum += o.g;
      dg_sum += f.delta[sz] * o.g;
      d_sum += f.delta[sz];
    }
    f.gauss_norm[s] = g_sum;
    f.in_norm[s] = (1.0 - params_.tp) + params_.tp * dg_sum / g_sum +
                   f.fp_scale * (delta_sum - d_sum);
  }
  return f;
}

double DetectionModel::likelihood_out_of_view(int z, const Pose& pose) const {
  const Frame& f = frame(pose);
  if (z < 0) {
    return f.out_null / f.out_norm;
  }
  const int sz = slot(f, z);
  if (sz < 0) {
    return 0.0;
  }
  return f.delta[sz] * f.fp_scale / f.out_norm;
}

double DetectionModel::likelihood(int z, int x, const Pose& pose) const {
  const Frame& f = frame(pose);
  const int sx = slot(f, x);
  if (sx < 0) {
    return likelihood_out_of_view(z, pose);
  }
  if (z < 0) {
    return (1.0 - params_.tp) / f.in_norm[sx];
  }
  const int sz = slot(f, z);
  if (sz < 0) {
    return 0.0;
  }
  const GridMap& m = vis_->map();
  const Cell zc = m.cell(z);
  const Cell xc = m.cell(x);
  if (in_disk(zc, xc)) {
    return f.delta[sz] * params_.tp * gaussian(zc, xc) / f.gauss_norm[sx] / f.in_norm[sx];
  }
  return f.delta[sz] * f.fp_scale / f.in_norm[sx];
}

int DetectionModel::sample(int x, const Pose& pose, Rng& rng) const {
  const Frame& f = frame(pose);
  const int sx = slot(f, x);
  const double u = uniform01(rng);
  if (sx < 0) {
    const double target = u * f.out_norm;
    if (target < f.out_null || f.fp_scale == 0.0 || f.visible.empty()) {
      return -1;
    }
    const double want = (target - f.out_null) / f.fp_scale;
    auto it = std::upper_bound(f.delta_cdf.begin(), f.delta_cdf.end(), want);
    if (it == f.delta_cdf.end()) --it;
    return f.visible[static_cast<std::size_t>(it - f.delta_cdf.begin())];
  }
  const GridMap& m = vis_->map();
  const Cell xc = m.cell(x);
  const double target = u * f.in_norm[sx];
  double acc = 1.0 - params_.tp;
  if (target < acc) {
    return -1;
  }
  int last = -1;
  for (std::size_t s = 0; s < f.visible.size(); ++s) {
    const Cell zc = m.cell(f.visible[s]);
    const double w = in_disk(zc, xc)
                         ? f.delta[s] * params_.tp * gaussian(zc, xc) / f.gauss_norm[sx]
                         : f.delta[s] * f.fp_scale;
    if (w > 0.0) last = f.visible[s];
    acc += w;
    if (target < acc) {
      return f.visible[s];
    }
  }
  return last;
}

// ---------------------------------------------------------------------------

CorrelationModel::CorrelationModel(const GridMap& map, CorrelationSpec spec)
    : spec_(spec), cell_size_(map.cell_size()), free_(map.free_cells()) {
  spec_.validate();
  support_.assign(map.num_cells(), 0);
  for (const Cell& t : free_) {
    int count = 0;
    for (const Cell& x : free_) {
      count += related(x, t) ? 1 : 0;
    }
    support_[map.index(t)] = count;
  }
}

double CorrelationModel::probability(Cell x_i, Cell x_target, const GridMap& map) const {
  const int n = support_[map.index(x_target)];
  if (n == 0 || !map.is_free(x_i) || !related(x_i, x_target)) {
    return 0.0;
  }
  return 1.0 / n;
}

Cell CorrelationModel::sample(Cell x_target, const GridMap& map, Rng& rng) const {
  const int n = support_[map.index(x_target)];
  if (n == 0) {
    throw std::domain_error("correlation support is empty for the target cell");
  }
  std::size_t k = uniform_index(rng, static_cast<std::size_t>(n));
  for (const Cell& x : free_) {
    if (related(x, x_target)) {
      if (k == 0) return x;
      --k;
    }
  }
  return x_target;
}

bool CorrelationModel::well_formed(const GridMap& map) const {
  return std::all_of(free_.begin(), free_.end(),
                     [&](const Cell& t) { return support_[map.index(t)] > 0; });
}

std::vector<double> correlational_likelihoods(int z, const Pose& pose, const DetectionModel& det,
                                              const CorrelationModel& corr) {
  const GridMap& m = det.map();
  const auto vis = det.visibility().visible(pose);
  std::vector<double> lik_visible(vis.size());
  for (std::size_t s = 0; s < vis.size(); ++s) {
    lik_visible[s] = det.likelihood(z, vis[s], pose);
  }
  const double lik_out = det.likelihood_out_of_view(z, pose);
  std::vector<double> out(m.num_cells(), 0.0);
  for (const Cell& t : m.free_cells()) {
    const int ti = m.index(t);
    const int support = corr.support_size(ti);
    if (support == 0) {
      throw std::domain_error("correlation support is empty for the target cell");
    }
    double sum = 0.0;
    int inside = 0;
    for (std::size_t s = 0; s < vis.size(); ++s) {
      if (corr.related(m.cell(vis[s]), t)) {
        sum += lik_visible[s];
        ++inside;
      }
    }
    out[ti] = (sum + (support - inside) * lik_out) / support;
  }
  return out;
}

}  // namespace cospomdp
