#include "cospomdp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace cospomdp {

namespace {

constexpr Cell kHeadingSteps[kNumHeadings] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                              {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

constexpr double kDistanceEps = 1e-9;

}  // namespace

double distance_cells(Cell a, Cell b) { return std::sqrt(static_cast<double>(distance_sq(a, b))); }

Cell heading_step(int heading) { return kHeadingSteps[((heading % kNumHeadings) + kNumHeadings) % kNumHeadings]; }

int heading_towards(Cell from, Cell to, int fallback) {
  if (from == to) {
    return fallback;
  }
  const double angle = std::atan2(static_cast<double>(to.row - from.row),
                                  static_cast<double>(to.col - from.col));
  const int k = static_cast<int>(std::lround(angle / (std::numbers::pi / 4.0)));
  return ((k % kNumHeadings) + kNumHeadings) % kNumHeadings;
}

std::string_view to_string(MoveAction a) {
  switch (a) {
    case MoveAction::MoveAhead:
      return "MoveAhead";
    case MoveAction::RotateLeft:
      return "RotateLeft";
    case MoveAction::RotateRight:
      return "RotateRight";
  }
  return "?";
}

GridMap::GridMap(int width, int height, std::span<const Cell> obstacles, double cell_size)
    : width_(width), height_(height), cell_size_(cell_size) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("grid dimensions must be positive");
  }
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("cell size must be positive");
  }
  blocked_.assign(static_cast<std::size_t>(width) * height, 0);
  for (const Cell& c : obstacles) {
    if (!in_bounds(c)) {
      throw std::invalid_argument("obstacle outside the grid");
    }
    blocked_[index(c)] = 1;
  }
  for (int i = 0; i < num_cells(); ++i) {
    if (blocked_[i] == 0) {
      free_.push_back(cell(i));
    }
  }
}

std::vector<Cell> GridMap::obstacles() const {
  std::vector<Cell> out;
  for (int i = 0; i < num_cells(); ++i) {
    if (blocked_[i] != 0) {
      out.push_back(cell(i));
    }
  }
  return out;
}

Pose apply_move(const Pose& pose, MoveAction action, const GridMap& map) {
  switch (action) {
    case MoveAction::RotateLeft:
      return {pose.cell, (pose.heading + 1) % kNumHeadings};
    case MoveAction::RotateRight:
      return {pose.cell, (pose.heading + kNumHeadings - 1) % kNumHeadings};
    case MoveAction::MoveAhead: {
      const Cell step = heading_step(pose.heading);
      const Cell next{pose.cell.col + step.col, pose.cell.row + step.row};
      if (map.is_free(next)) {
        return {next, pose.heading};
      }
      return pose;
    }
  }
  return pose;
}

bool in_fov(const Pose& pose, Cell c) {
  const Cell h = heading_step(pose.heading);
  const long dc = c.col - pose.cell.col;
  const long dr = c.row - pose.cell.row;
  if (dc == 0 && dr == 0) {
    return false;
  }
  const long dot = h.col * dc + h.row * dr;
  if (dot <= 0) {
    return false;
  }
  const long h2 = h.col * h.col + h.row * h.row;
  const long v2 = dc * dc + dr * dr;
  // cos(angle) >= 1/sqrt(2), squared and cleared of denominators.
  return 2 * dot * dot >= h2 * v2;
}

bool line_of_sight(const GridMap& map, Cell from, Cell to) {
  const long adx = std::labs(static_cast<long>(to.col) - from.col);
  const long ady = std::labs(static_cast<long>(to.row) - from.row);
  const int sx = to.col > from.col ? 1 : -1;
  const int sy = to.row > from.row ? 1 : -1;
  // The i-th vertical grid line is crossed at t = (2i+1) / (2 adx), the j-th
  // horizontal one at t = (2j+1) / (2 ady); compare exactly in integers.
  long i = 0;
  long j = 0;
  Cell cur = from;
  while (i < adx || j < ady) {
    long cmp;
    if (i >= adx) {
      cmp = 1;
    } else if (j >= ady) {
      cmp = -1;
    } else {
      const long lhs = (2 * i + 1) * ady;
      const long rhs = (2 * j + 1) * adx;
      cmp = lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    }
    if (cmp < 0) {
      cur.col += sx;
      ++i;
    } else if (cmp > 0) {
      cur.row += sy;
      ++j;
    } else {
      // Through a grid vertex: the two side cells are only touched.
      cur.col += sx;
      cur.row += sy;
      ++i;
      ++j;
    }
    if (cur == to) {
      break;
    }
    if (!map.in_bounds(cur) || map.is_obstacle(cur)) {
      return false;
    }
  }
  return true;
}

std::vector<Cell> visible_cells(const Pose& pose, const GridMap& map) {
  std::vector<Cell> out;
  for (int idx = 0; idx < map.num_cells(); ++idx) {
    const Cell c = map.cell(idx);
    if (map.is_free(c) && in_fov(pose, c) && line_of_sight(map, pose.cell, c)) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<int> bfs_steps(const GridMap& map, Cell from) {
  std::vector<int> dist(map.num_cells(), -1);
  if (!map.is_free(from)) {
    return dist;
  }
  std::deque<int> queue;
  dist[map.index(from)] = 0;
  queue.push_back(map.index(from));
  while (!queue.empty()) {
    const int cur = queue.front();
    queue.pop_front();
    const Cell c = map.cell(cur);
    for (int h = 0; h < kNumHeadings; ++h) {
      const Cell s = heading_step(h);
      const Cell n{c.col + s.col, c.row + s.row};
      if (map.is_free(n) && dist[map.index(n)] < 0) {
        dist[map.index(n)] = dist[cur] + 1;
        queue.push_back(map.index(n));
      }
    }
  }
  return dist;
}

std::vector<Cell> reachable_cells(const GridMap& map, Cell from) {
  const std::vector<int> dist = bfs_steps(map, from);
  std::vector<Cell> out;
  for (int i = 0; i < map.num_cells(); ++i) {
    if (dist[i] >= 0) {
      out.push_back(map.cell(i));
    }
  }
  return out;
}

std::optional<double> shortest_path_length(const GridMap& map, const Pose& from, Cell to_cell,
                                           double success_distance) {
  const std::vector<int> dist = bfs_steps(map, from.cell);
  const double range_cells = success_distance / map.cell_size();
  int best = -1;
  for (int i = 0; i < map.num_cells(); ++i) {
    if (dist[i] < 0) {
      continue;
    }
    if (distance_cells(map.cell(i), to_cell) <= range_cells + kDistanceEps &&
        (best < 0 || dist[i] < best)) {
      best = dist[i];
    }
  }
  if (best < 0) {
    return std::nullopt;
  }
  return best * map.cell_size();
}

bool success_check(const Pose& pose, Cell target, const GridMap& map, double success_distance) {
  if (distance_cells(pose.cell, target) * map.cell_size() > success_distance + kDistanceEps) {
    return false;
  }
  return map.is_free(target) && in_fov(pose, target) && line_of_sight(map, pose.cell, target);
}

VisibilityMap::VisibilityMap(GridMap map)
    : map_(std::move(map)),
      cache_(static_cast<std::size_t>(map_.num_cells()) * kNumHeadings),
      once_(std::make_unique<std::once_flag[]>(static_cast<std::size_t>(map_.num_cells()) *
                                               kNumHeadings)) {}

std::span<const int> VisibilityMap::visible(const Pose& pose) const {
  const int pi = pose_index(pose);
  std::call_once(once_[pi], [&] {
    std::vector<int>& out = cache_[pi];
    for (const Cell& c : visible_cells(pose, map_)) {
      out.push_back(map_.index(c));
    }
  });
  return cache_[pi];
}

bool VisibilityMap::is_visible(const Pose& pose, int cell_index) const {
  const auto vis = visible(pose);
  return std::binary_search(vis.begin(), vis.end(), cell_index);
}

}  // namespace cospomdp
