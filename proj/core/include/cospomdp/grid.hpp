#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace cospomdp {

struct Cell {
  int col = 0;
  int row = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Squared Euclidean distance in cells.
constexpr int distance_sq(Cell a, Cell b) {
  const int dc = a.col - b.col;
  const int dr = a.row - b.row;
  return dc * dc + dr * dr;
}

double distance_cells(Cell a, Cell b);

/// Discrete viewpoint: a cell plus one of 8 headings, heading k meaning k*45
/// degrees counter-clockwise from +col (east).
struct Pose {
  Cell cell;
  int heading = 0;

  friend constexpr auto operator<=>(const Pose&, const Pose&) = default;
};

inline constexpr int kNumHeadings = 8;

/// Unit step (dcol, drow) for a heading.
Cell heading_step(int heading);

/// Heading (0..7) closest to the direction from `from` to `to`; `fallback`
/// when the cells coincide.
int heading_towards(Cell from, Cell to, int fallback);

enum class MoveAction : std::uint8_t { MoveAhead, RotateLeft, RotateRight };

inline constexpr MoveAction kMoveActions[] = {MoveAction::MoveAhead, MoveAction::RotateLeft,
                                              MoveAction::RotateRight};

std::string_view to_string(MoveAction a);

class GridMap {
 public:
  GridMap() = default;
  GridMap(int width, int height, std::span<const Cell> obstacles = {}, double cell_size = 0.25);

  int width() const { return width_; }
  int height() const { return height_; }
  double cell_size() const { return cell_size_; }
  int num_cells() const { return width_ * height_; }

  bool in_bounds(Cell c) const {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  bool is_obstacle(Cell c) const { return blocked_[index(c)] != 0; }
  bool is_free(Cell c) const { return in_bounds(c) && blocked_[index(c)] == 0; }

  int index(Cell c) const { return c.row * width_ + c.col; }
  Cell cell(int index) const { return {index % width_, index / width_}; }

  const std::vector<Cell>& free_cells() const { return free_; }
  std::vector<Cell> obstacles() const;

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.cell_size_ == b.cell_size_ &&
           a.blocked_ == b.blocked_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 0.25;
  std::vector<std::uint8_t> blocked_;
  std::vector<Cell> free_;
};

/// Deterministic transition. Blocked or out-of-bounds MoveAhead leaves the
/// pose unchanged.
Pose apply_move(const Pose& pose, MoveAction action, const GridMap& map);

/// True iff `c` lies inside the 90 degree cone around the heading (ties at
/// exactly 45 degrees included). The pose's own cell is never in view.
bool in_fov(const Pose& pose, Cell c);

/// True iff the segment between cell centers passes through no obstacle
/// interior. Touching an obstacle corner does not block.
bool line_of_sight(const GridMap& map, Cell from, Cell to);

/// Cells in the field of view with clear line of sight, sorted by index.
std::vector<Cell> visible_cells(const Pose& pose, const GridMap& map);

/// Number of MoveAhead steps from `from` to every cell (-1 if unreachable).
std::vector<int> bfs_steps(const GridMap& map, Cell from);

/// Cells reachable from `from` by MoveAhead sequences (including `from`).
std::vector<Cell> reachable_cells(const GridMap& map, Cell from);

/// Length in meters of the shortest translation sequence from `from` to any
/// free cell within `success_distance` of `to_cell`. Rotations are free and
/// every MoveAhead counts one cell_size. nullopt when unreachable.
std::optional<double> shortest_path_length(const GridMap& map, const Pose& from, Cell to_cell,
                                           double success_distance);

bool success_check(const Pose& pose, Cell target, const GridMap& map, double success_distance);

/// Lazily filled, thread-safe cache of visible cell indices for every pose.
class VisibilityMap {
 public:
  explicit VisibilityMap(GridMap map);

  const GridMap& map() const { return map_; }
  int pose_index(const Pose& p) const { return map_.index(p.cell) * kNumHeadings + p.heading; }

  /// Sorted cell indices visible from `pose`.
  std::span<const int> visible(const Pose& pose) const;
  bool is_visible(const Pose& pose, int cell_index) const;

 private:
  GridMap map_;
  mutable std::vector<std::vector<int>> cache_;
  mutable std::unique_ptr<std::once_flag[]> once_;
};

}  // namespace cospomdp
