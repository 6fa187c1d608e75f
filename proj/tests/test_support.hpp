#pragma once

// Random instances and brute-force reference implementations shared by the
// unit tests and the acceptance binary. The *_reference functions and
// ucs_cost use no library geometry or sensing code.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <memory>
#include <limits>
#include <optional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "cospomdp/cos_pomdp.hpp"
#include "cospomdp/grid.hpp"
#include "cospomdp/rng.hpp"
#include "cospomdp/sensing.hpp"

namespace cospomdp::testing {

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Map with each cell blocked independently with probability `density`,
/// keeping at least one free cell.
inline GridMap random_map(Rng& rng, int width, int height, double density) {
  std::vector<Cell> blocked;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (uniform01(rng) < density) blocked.push_back({c, r});
    }
  }
  if (static_cast<int>(blocked.size()) == width * height) blocked.pop_back();
  return GridMap(width, height, blocked);
}

inline Cell random_free_cell(const GridMap& map, Rng& rng) {
  return map.free_cells()[uniform_index(rng, map.free_cells().size())];
}

inline Pose random_pose(const GridMap& map, Rng& rng) {
  return {random_free_cell(map, rng), uniform_int(rng, 0, kNumHeadings - 1)};
}

/// Angle test in floating point: within 45 degrees of the heading.
inline bool fov_reference(const Pose& p, Cell c) {
  if (c == p.cell) return false;
  const double heading = p.heading * std::numbers::pi / 4.0;
  const double angle = std::atan2(c.row - p.cell.row, c.col - p.cell.col);
  double diff = std::fmod(std::fabs(angle - heading), 2.0 * std::numbers::pi);
  diff = std::min(diff, 2.0 * std::numbers::pi - diff);
  return diff <= std::numbers::pi / 4.0 + 1e-12;
}

/// Dense sampling along the segment between cell centers; a sample counts
/// only when it is strictly inside a cell, so corner touches never block.
inline bool los_reference(const GridMap& map, Cell a, Cell b) {
  const int samples = 4000;
  for (int k = 1; k < samples; ++k) {
    const double t = static_cast<double>(k) / samples;
    const double x = a.col + t * (b.col - a.col);
    const double y = a.row + t * (b.row - a.row);
    const double fx = x + 0.5 - std::floor(x + 0.5);
    const double fy = y + 0.5 - std::floor(y + 0.5);
    if (fx < 1e-9 || fx > 1.0 - 1e-9 || fy < 1e-9 || fy > 1.0 - 1e-9) continue;
    const Cell c{static_cast<int>(std::floor(x + 0.5)), static_cast<int>(std::floor(y + 0.5))};
    if (c == a || c == b) continue;
    if (!map.in_bounds(c) || map.is_obstacle(c)) return false;
  }
  return true;
}

/// Step counts by repeated relaxation over the 8-neighborhood.
inline std::vector<int> steps_reference(const GridMap& map, Cell from) {
  std::vector<int> d(map.num_cells(), -1);
  if (!map.is_free(from)) return d;
  d[map.index(from)] = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < map.num_cells(); ++i) {
      if (d[i] < 0) continue;
      const Cell c = map.cell(i);
      for (int dc = -1; dc <= 1; ++dc) {
        for (int dr = -1; dr <= 1; ++dr) {
          const Cell n{c.col + dc, c.row + dr};
          if ((dc == 0 && dr == 0) || !map.is_free(n)) continue;
          int& dn = d[map.index(n)];
          if (dn < 0 || dn > d[i] + 1) {
            dn = d[i] + 1;
            changed = true;
          }
        }
      }
    }
  }
  return d;
}

/// Uniform-cost search over (cell, heading) with a plain FIFO per cost
/// layer; every primitive costs 1. Returns -1 when the goal is unreachable.
inline int ucs_cost(const GridMap& map, const Pose& from, Cell goal) {
  if (from.cell == goal) return 0;
  auto key = [&](Cell c, int h) { return map.index(c) * kNumHeadings + h; };
  std::vector<int> cost(static_cast<std::size_t>(map.num_cells()) * kNumHeadings, -1);
  std::deque<std::pair<Cell, int>> frontier{{from.cell, from.heading}};
  cost[key(from.cell, from.heading)] = 0;
  static constexpr int kDc[] = {1, 1, 0, -1, -1, -1, 0, 1};
  static constexpr int kDr[] = {0, 1, 1, 1, 0, -1, -1, -1};
  while (!frontier.empty()) {
    const auto [c, h] = frontier.front();
    frontier.pop_front();
    const int g = cost[key(c, h)];
    if (c == goal) return g;
    const Cell ahead{c.col + kDc[h], c.row + kDr[h]};
    const std::pair<Cell, int> next[] = {
        {map.is_free(ahead) ? ahead : c, h}, {c, (h + 1) % 8}, {c, (h + 7) % 8}};
    for (const auto& [nc, nh] : next) {
      int& slot = cost[key(nc, nh)];
      if (slot < 0) {
        slot = g + 1;
        frontier.emplace_back(nc, nh);
      }
    }
  }
  return -1;
}

}  // namespace cospomdp::testing


namespace cospomdp::testing {

/// Independent five-case detector: weights from the case table, normalized
/// over {null} and the visible cells. Index 0 is null, then visible cells
/// in index order.
struct DetectorReference {
  std::vector<Cell> visible;
  std::vector<double> probs;
};

inline DetectorReference detector_reference(Cell x, const Pose& pose, const DetectorParams& p,
                                            const GridMap& map) {
  DetectorReference out;
  for (const Cell& c : map.free_cells()) {
    if (fov_reference(pose, c) && los_reference(map, pose.cell, c)) out.visible.push_back(c);
  }
  auto meters = [&](Cell a, Cell b) {
    return std::hypot(a.col - b.col, a.row - b.row) * map.cell_size();
  };
  int in_range = 0;
  for (const Cell& c : out.visible) in_range += meters(c, pose.cell) <= p.r + 1e-9 ? 1 : 0;
  const bool x_in = std::find(out.visible.begin(), out.visible.end(), x) != out.visible.end();
  const double radius = 3.0 * p.sigma;
  auto gauss = [&](Cell c) {
    const double d = meters(c, x);
    return std::exp(-d * d / (2.0 * p.sigma * p.sigma));
  };
  double gauss_total = 0.0;
  for (const Cell& c : out.visible) {
    if (meters(c, x) <= radius + 1e-9) gauss_total += gauss(c);
  }
  out.probs.push_back(x_in ? 1.0 - p.tp : (in_range > 0 ? 1.0 - p.fp : 1.0));
  for (const Cell& z : out.visible) {
    const double dz = meters(z, pose.cell);
    const double delta = dz <= p.r + 1e-9 ? 1.0 : std::exp(-(dz - p.r) * (dz - p.r));
    double w = 0.0;
    if (x_in && meters(z, x) <= radius + 1e-9) {
      w = delta * p.tp * gauss(z) / gauss_total;
    } else if (in_range > 0) {
      w = delta * p.fp / in_range;
    }
    out.probs.push_back(w);
  }
  double total = 0.0;
  for (double w : out.probs) total += w;
  for (double& w : out.probs) w /= total;
  return out;
}

inline DetectorParams random_detector(Rng& rng) {
  return {uniform01(rng), uniform01(rng) * 0.5, 0.25 + uniform01(rng) * 1.5,
          0.1 + uniform01(rng) * 0.5};
}

/// Chi-square statistic of observed counts against expected probabilities,
/// with outcomes of expected count below 5 pooled into one bin. Returns the
/// statistic and the degrees of freedom.
inline std::pair<double, int> chi_square(const std::vector<long>& counts,
                                         const std::vector<double>& probs, long n) {
  double stat = 0.0;
  int bins = 0;
  double pooled_expected = 0.0;
  long pooled_observed = 0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double e = probs[k] * static_cast<double>(n);
    if (e < 5.0) {
      pooled_expected += e;
      pooled_observed += counts[k];
      continue;
    }
    stat += (counts[k] - e) * (counts[k] - e) / e;
    ++bins;
  }
  if (pooled_expected >= 5.0) {
    stat += (pooled_observed - pooled_expected) * (pooled_observed - pooled_expected) /
            pooled_expected;
    ++bins;
  } else if (static_cast<double>(pooled_observed) > 10.0 + 4.0 * pooled_expected) {
    return {std::numeric_limits<double>::infinity(), std::max(bins - 1, 1)};
  }
  return {stat, std::max(bins - 1, 1)};
}

/// Upper 1% point of the chi-square distribution (Wilson-Hilferty).
inline double chi_square_critical_99(int dof) {
  const double k = dof;
  const double t = 1.0 - 2.0 / (9.0 * k) + 2.3263478740408408 * std::sqrt(2.0 / (9.0 * k));
  return k * t * t * t;
}

}  // namespace cospomdp::testing


namespace cospomdp::testing {

struct ObjectModelSpec {
  DetectorParams detector;
  CorrelationSpec correlation;
};

inline CosModel make_model(const GridMap& map, const DetectorParams& target,
                           const std::vector<ObjectModelSpec>& objects,
                           double success_distance = 1.0) {
  auto vis = std::make_shared<const VisibilityMap>(map);
  std::vector<CorrelatedObject> correlated;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    correlated.push_back({"obj" + std::to_string(i + 1),
                          std::make_shared<const DetectionModel>(vis, objects[i].detector),
                          std::make_shared<const CorrelationModel>(map, objects[i].correlation)});
  }
  return CosModel(vis, "target", std::make_shared<const DetectionModel>(vis, target),
                  std::move(correlated), success_distance);
}

/// Strictly positive random target belief on the free cells.
inline CosBelief random_belief(const GridMap& map, const Pose& robot, Rng& rng) {
  CosBelief b = CosBelief::uniform(map, robot);
  double total = 0.0;
  for (const Cell& c : map.free_cells()) {
    b.target_dist[map.index(c)] = 0.05 + uniform01(rng);
    total += b.target_dist[map.index(c)];
  }
  for (double& p : b.target_dist) p /= total;
  return b;
}

/// Every joint observation from `pose` whose detections are null or visible.
inline std::vector<JointObservation> enumerate_observations(const GridMap& map, const Pose& pose,
                                                            std::size_t num_classes) {
  std::vector<std::optional<Cell>> values{std::nullopt};
  for (const Cell& c : visible_cells(pose, map)) values.emplace_back(c);
  std::vector<JointObservation> out;
  std::vector<std::size_t> digits(num_classes, 0);
  for (;;) {
    JointObservation z{pose, {}};
    for (std::size_t i = 0; i < num_classes; ++i) {
      z.detections.push_back({static_cast<std::uint16_t>(i), values[digits[i]]});
    }
    out.push_back(std::move(z));
    std::size_t k = 0;
    while (k < num_classes && ++digits[k] == values.size()) digits[k++] = 0;
    if (k == num_classes) break;
  }
  return out;
}

/// Exact optimal first action in the corridor by value iteration over
/// (column, heading), with Done terminal.
inline Action corridor_optimum(int length, int target_col, double success_cells, double gamma) {
  auto success = [&](int col, int h) {
    return std::abs(col - target_col) <= success_cells &&
           fov_reference({{col, 0}, h}, {target_col, 0});
  };
  auto step = [&](int col, int h, int a) -> std::pair<int, int> {
    if (a == 1) return {col, (h + 1) % 8};
    if (a == 2) return {col, (h + 7) % 8};
    const int dc = h == 0 || h == 1 || h == 7 ? 1 : (h >= 3 && h <= 5 ? -1 : 0);
    const int dr = h >= 1 && h <= 3 ? 1 : (h >= 5 ? -1 : 0);
    const int nc = col + dc;
    if (dr != 0 || nc < 0 || nc >= length) return {col, h};
    return {nc, h};
  };
  std::vector<std::array<double, 8>> v(length);
  for (auto& row : v) row.fill(0.0);
  auto q = [&](int col, int h, int a) {
    if (a == 3) return success(col, h) ? 100.0 : -100.0;
    const auto [nc, nh] = step(col, h, a);
    return -1.0 + gamma * v[nc][nh];
  };
  for (int it = 0; it < 2000; ++it) {
    for (int col = 0; col < length; ++col) {
      for (int h = 0; h < 8; ++h) {
        double best = q(col, h, 0);
        for (int a = 1; a < 4; ++a) best = std::max(best, q(col, h, a));
        v[col][h] = best;
      }
    }
  }
  int best = 0;
  for (int a = 1; a < 4; ++a) {
    if (q(0, 0, a) > q(0, 0, best)) best = a;
  }
  return kAllActions[best];
}


}  // namespace cospomdp::testing
