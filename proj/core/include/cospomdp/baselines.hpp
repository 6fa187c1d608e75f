#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cospomdp/agent.hpp"
#include "cospomdp/hierarchy.hpp"

namespace cospomdp {

/// Uniform over the three moves and Done.
class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(const GridMap& map);

  std::string_view name() const override { return "random"; }
  Action act(const std::optional<JointObservation>& z, Rng& rng) override;
  std::vector<double> target_belief() const override { return uniform_; }

 private:
  std::vector<double> uniform_;
};

/// Weighted particles over (target, x_1, ..., x_n) cell indices.
struct ParticleBelief {
  std::size_t num_classes = 1;     ///< target plus correlated objects
  std::vector<int> particles;      ///< row-major, num_classes entries per particle
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  const int* particle(std::size_t k) const { return particles.data() + k * num_classes; }

  /// Draws n particles from the joint prior: uniform target over free cells,
  /// each object from its correlation model given the target.
  static ParticleBelief from_prior(const CosModel& model, std::size_t n, Rng& rng);

  double effective_size() const;
  std::vector<double> target_marginal(const GridMap& map) const;
};

/// Reweights by the detection likelihoods of `z`. Resamples systematically
/// and replaces a `reinvigoration` fraction with prior draws when the
/// effective size drops below half; total depletion restarts from the prior.
void particle_update(ParticleBelief& pb, const JointObservation& z, const CosModel& model,
                     double reinvigoration, Rng& rng);

/// Weighted probability that at least one class is detected (non-null) from `pose`.
double detect_any_probability(const ParticleBelief& pb, const Pose& pose, const CosModel& model);

/// Myopic next-best-view search over a joint particle belief. Viewpoints are
/// topological-graph nodes at each heading, scored by detection probability
/// minus lambda times path meters; the agent navigates to its committed
/// viewpoint with A* and declares Done when the modal target passes the
/// success check.
class GreedyNbvAgent final : public Agent {
 public:
  GreedyNbvAgent(CosModel model, const Pose& init, GreedyParams params, HierParams graph_params,
                 Rng& rng);

  std::string_view name() const override { return "greedy-nbv"; }
  Action act(const std::optional<JointObservation>& z, Rng& rng) override;
  std::vector<double> target_belief() const override;
  std::string subgoal() const override;

  const ParticleBelief& particles() const { return particles_; }
  const std::optional<Pose>& committed() const { return goal_; }

  /// The viewpoint the agent would commit to from `pose` given `views`.
  Pose choose_view(const Pose& pose, const std::vector<Pose>& views,
                   const std::vector<double>& path_meters) const;

 private:
  void commit(Rng& rng);

  CosModel model_;
  GreedyParams params_;
  HierParams graph_params_;
  PlaceProjection projection_;
  ParticleBelief particles_;
  Pose pose_;
  std::optional<Pose> goal_;
};

}  // namespace cospomdp
