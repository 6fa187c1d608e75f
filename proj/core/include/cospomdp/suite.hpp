#pragma once

#include <cstdint>
#include <vector>

#include "cospomdp/scenario.hpp"

namespace cospomdp {

inline constexpr DetectorParams kHardTarget{0.35, 0.09, 1.5, 0.5};
inline constexpr DetectorParams kEasyLandmark{0.85, 0.03, 2.5, 0.5};
inline constexpr double kLandmarkDistance = 0.75;  ///< meters, Close relation

struct SuiteOptions {
  int min_size = 24;  ///< cells per side
  int max_size = 28;
  double landmark_d = kLandmarkDistance;
  double min_start_distance = 2.5;  ///< meters from the target
};

/// Random cluttered rooms with a hard-to-detect target and one easy landmark
/// drawn from the Close correlation around it. Every free cell is reachable
/// from the start.
std::vector<ScenarioSpec> generate_trend_suite(std::uint64_t seed, int count = 10,
                                               const SuiteOptions& options = {});

/// Single-row corridor: the robot at column 0 faces east, the target sits
/// `target_offset` cells ahead, and the detector is perfect.
ScenarioSpec corridor_scenario(int length = 8, int target_offset = 5);

}  // namespace cospomdp
