#pragma once

#include <cstddef>
#include <vector>

#include "cospomdp/cos_pomdp.hpp"

namespace cospomdp {

inline constexpr std::size_t kDefaultFBeliefCap = 1'000'000;

/// Dense joint belief over (target, x_1, ..., x_n) on the free cells. The
/// size is exponential in n; only used to check the reduced model.
struct FBelief {
  Pose robot;
  std::vector<int> domain;  ///< free cell indices
  std::size_t num_objects = 0;
  /// Flattened joint; the target is the fastest-varying coordinate.
  std::vector<double> joint;

  std::size_t index(std::size_t target_slot, const std::vector<std::size_t>& object_slots) const;
  double total() const;

  /// b_target(t) * prod_i C(x_i | t) over the model's correlated classes.
  static FBelief from_cos(const CosBelief& b, const CosModel& model,
                          std::size_t cap = kDefaultFBeliefCap);
};

/// Bayes update with per-object detection models only (no correlational
/// factor); objects are static. Zero posterior mass resets to uniform.
FBelief fpomdp_update(const FBelief& b, Action a, const JointObservation& z,
                      const CosModel& model);

/// Sum over x_1..x_n; returned indexed by cell index like CosBelief.
std::vector<double> marginal_target(const FBelief& b, const GridMap& map);

}  // namespace cospomdp
