#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cospomdp/cos_pomdp.hpp"

namespace cospomdp {

/// Closed-loop search agent. `act` receives the observation produced by the
/// previous action (none on the first call) and returns the next action.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string_view name() const = 0;
  virtual Action act(const std::optional<JointObservation>& z, Rng& rng) = 0;

  /// Current belief over the target cell, indexed by cell index.
  virtual std::vector<double> target_belief() const = 0;
  /// Subgoal or commitment behind the last action; empty if the agent has none.
  virtual std::string subgoal() const { return {}; }
  virtual std::uint64_t belief_hash() const;
};

/// FNV-1a over the bytes of a distribution.
std::uint64_t hash_distribution(const std::vector<double>& p);

}  // namespace cospomdp
