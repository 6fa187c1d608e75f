#include "cospomdp/suite.hpp"

#include <fmt/format.h>

#include "cospomdp/rng.hpp"

namespace cospomdp {

namespace {

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(hi - lo + 1)));
}

GridMap cluttered_room(Rng& rng, int width, int height) {
  for (;;) {
    std::vector<Cell> blocked;
    const int blocks = uniform_int(rng, 4, 7);
    for (int b = 0; b < blocks; ++b) {
      const int w = uniform_int(rng, 1, 4);
      const int h = uniform_int(rng, 1, 3);
      const int c0 = uniform_int(rng, 1, width - w - 1);
      const int r0 = uniform_int(rng, 1, height - h - 1);
      for (int c = c0; c < c0 + w; ++c) {
        for (int r = r0; r < r0 + h; ++r) blocked.push_back({c, r});
      }
    }
    GridMap map(width, height, blocked);
    if (reachable_cells(map, map.free_cells().front()).size() == map.free_cells().size()) return map;
  }
}

}  // namespace

std::vector<ScenarioSpec> generate_trend_suite(std::uint64_t seed, int count,
                                               const SuiteOptions& opt) {
  std::vector<ScenarioSpec> out;
  for (std::uint64_t attempt = 0; static_cast<int>(out.size()) < count; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    ScenarioSpec s;
    s.name = fmt::format("trend-{:02d}", out.size());
    s.map = cluttered_room(rng, uniform_int(rng, opt.min_size, opt.max_size),
                           uniform_int(rng, opt.min_size, opt.max_size));
    const auto& free = s.map.free_cells();
    const double d_cells = opt.landmark_d / s.map.cell_size();
    const double start_cells = opt.min_start_distance / s.map.cell_size();

    const Cell target = free[uniform_index(rng, free.size())];
    std::vector<Cell> near;
    std::vector<Cell> starts;
    for (const Cell& c : free) {
      const double d = distance_cells(c, target);
      if (c != target && d < d_cells - 1e-9) near.push_back(c);
      if (d >= start_cells) starts.push_back(c);
    }
    if (near.empty() || starts.empty()) continue;
    s.target = {"Target", target, kHardTarget};
    s.objects.push_back({"Landmark", near[uniform_index(rng, near.size())], kEasyLandmark,
                         {Relation::Close, opt.landmark_d}});
    s.init_pose = {starts[uniform_index(rng, starts.size())],
                   static_cast<int>(uniform_index(rng, kNumHeadings))};
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

ScenarioSpec corridor_scenario(int length, int target_offset) {
  ScenarioSpec s;
  s.name = "corridor";
  s.map = GridMap(length, 1);
  s.target = {"Target", {target_offset, 0}, DetectorParams{1.0, 0.0, 100.0, 0.01}};
  s.init_pose = {{0, 0}, 0};
  s.success_distance = 0.25;
  s.validate();
  return s;
}

}  // namespace cospomdp
