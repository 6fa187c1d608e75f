#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cospomdp/grid.hpp"
#include "cospomdp/rng.hpp"
#include "cospomdp/scenario.hpp"
#include "cospomdp/sensing.hpp"

namespace cospomdp {

/// Agent-level action: a primitive move or Done.
enum class Action : std::uint8_t { MoveAhead, RotateLeft, RotateRight, Done };

inline constexpr Action kAllActions[] = {Action::MoveAhead, Action::RotateLeft,
                                         Action::RotateRight, Action::Done};

std::string_view to_string(Action a);
std::optional<Action> action_from_string(std::string_view s);
std::optional<MoveAction> as_move(Action a);
Action to_action(MoveAction m);

inline constexpr double kRewardMax = 100.0;
inline constexpr double kRewardMin = -100.0;
inline constexpr double kStepCost = -1.0;

struct CosState {
  Pose robot;
  Cell target;

  friend auto operator<=>(const CosState&, const CosState&) = default;
};

/// Noiseless robot pose plus one detection per modeled class, target first.
struct JointObservation {
  Pose robot_pose;
  std::vector<Detection> detections;

  friend bool operator==(const JointObservation&, const JointObservation&) = default;
};

struct CorrelatedObject {
  std::string name;
  std::shared_ptr<const DetectionModel> detector;
  std::shared_ptr<const CorrelationModel> correlation;
};

/// Observation, transition and reward structure of the reduced POMDP over
/// (robot pose, target cell). Immutable; cheap to copy.
class CosModel {
 public:
  CosModel(std::shared_ptr<const VisibilityMap> visibility, std::string target_name,
           std::shared_ptr<const DetectionModel> target_detector,
           std::vector<CorrelatedObject> correlated, double success_distance);

  const GridMap& map() const { return vis_->map(); }
  const VisibilityMap& visibility() const { return *vis_; }
  const std::shared_ptr<const VisibilityMap>& visibility_ptr() const { return vis_; }
  const std::string& target_name() const { return target_name_; }
  const DetectionModel& target_detector() const { return *target_; }
  const std::vector<CorrelatedObject>& correlated() const { return correlated_; }
  std::size_t num_classes() const { return 1 + correlated_.size(); }
  double success_distance() const { return success_distance_; }

  /// Same model with the correlated classes dropped (target-only sensing).
  CosModel target_only() const;

  /// Draws z ~ Pr(. | pose, target): correlated objects are first placed by
  /// their correlation model, then detected.
  JointObservation sample_observation(const Pose& pose, Cell target, Rng& rng) const;

  /// Keeps the first num_classes() detections of `z`.
  JointObservation project(const JointObservation& z) const;

  /// Pr(z_objects | x_target, pose) for every cell index (zero on obstacles).
  std::vector<double> observation_likelihoods(const JointObservation& z) const;

 private:
  std::shared_ptr<const VisibilityMap> vis_;
  std::string target_name_;
  std::shared_ptr<const DetectionModel> target_;
  std::vector<CorrelatedObject> correlated_;
  double success_distance_;
};

/// Shared, immutable per-scenario model resources (visibility and detector
/// tables), reused by every agent and trial on that scenario.
class ScenarioResources {
 public:
  explicit ScenarioResources(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  const std::shared_ptr<const VisibilityMap>& visibility() const { return vis_; }
  const DetectionModel& target_detector() const { return *target_; }
  const DetectionModel& object_detector(std::size_t i) const { return *objects_[i]; }

  /// The agent's model under the given ablation.
  CosModel model(Ablation ablation) const;
  CosModel model() const { return model(spec_.ablation); }

 private:
  ScenarioSpec spec_;
  std::shared_ptr<const VisibilityMap> vis_;
  std::shared_ptr<const DetectionModel> target_;
  std::vector<std::shared_ptr<const DetectionModel>> objects_;
  std::vector<std::shared_ptr<const CorrelationModel>> accurate_;
  std::vector<std::shared_ptr<const CorrelationModel>> wrong_;
};

/// Categorical belief over target cells with a known robot pose.
struct CosBelief {
  Pose robot;
  std::vector<double> target_dist;  ///< indexed by cell index, zero on obstacles
  std::uint32_t resets = 0;         ///< uniform resets along this belief's history

  static CosBelief uniform(const GridMap& map, const Pose& robot);

  Cell sample_target(const GridMap& map, Rng& rng) const;
  Cell mode(const GridMap& map) const;
  double total() const;
  /// FNV-1a over the probability bytes; stable across runs of one build.
  std::uint64_t hash() const;
};

double joint_observation_likelihood(const JointObservation& z, const CosState& s,
                                    const CosModel& model);

/// Exact Bayes filter step; the target is static and the pose is taken from
/// the observation. An impossible observation resets to uniform.
CosBelief belief_update(const CosBelief& b, Action a, const JointObservation& z,
                        const CosModel& model);

double reward(const CosState& s, Action a, const CosModel& model);

}  // namespace cospomdp
