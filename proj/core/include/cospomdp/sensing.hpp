#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cospomdp/grid.hpp"
#include "cospomdp/rng.hpp"

namespace cospomdp {

/// Per-class detector noise: true/false positive rates, the mean range of
/// true positives (meters) and the localization width sigma (meters).
struct DetectorParams {
  double tp = 0.0;
  double fp = 0.0;
  double r = 1.0;
  double sigma = 0.5;

  void validate() const;
  friend bool operator==(const DetectorParams&, const DetectorParams&) = default;
};

enum class Relation : std::uint8_t { Close, Far };

std::string_view to_string(Relation r);

struct CorrelationSpec {
  Relation relation = Relation::Close;
  double d = 1.0;  ///< expected inter-class distance, meters

  void validate() const;
  CorrelationSpec flipped() const {
    return {relation == Relation::Close ? Relation::Far : Relation::Close, d};
  }
  friend bool operator==(const CorrelationSpec&, const CorrelationSpec&) = default;
};

/// One detector output. `object` indexes the scenario class list (0 is the
/// target); an empty value is a null detection.
struct Detection {
  std::uint16_t object = 0;
  std::optional<Cell> value;

  friend auto operator<=>(const Detection&, const Detection&) = default;
};

// Direct (uncached) evaluation of the five-case line-of-sight detection
// model. These recompute the field of view on every call and serve as the
// reference for DetectionModel.

/// Unnormalized weight of `z` given the object at `x_i`.
double detection_score(const Detection& z, Cell x_i, const Pose& pose,
                       const DetectorParams& params, const GridMap& map);

/// Pr(z | x_i, pose), normalized over {null} and the visible cells.
double detection_likelihood(const Detection& z, Cell x_i, const Pose& pose,
                            const DetectorParams& params, const GridMap& map);

Detection sample_detection(std::uint16_t object, Cell x_i, const Pose& pose,
                           const DetectorParams& params, const GridMap& map, Rng& rng);

/// Binary close/far indicator; both relations are strict at distance d.
int correlation_prob(Cell x_i, Cell x_target, const CorrelationSpec& spec, double cell_size);

/// Pr(z_i | x_target, pose) = sum over x_i of Pr(z_i | x_i, pose) C(x_i | x_target),
/// with C uniform over the free cells satisfying the relation.
/// Throws std::domain_error when that support is empty.
double correlational_likelihood(const Detection& z, Cell x_target, const Pose& pose,
                                const DetectorParams& det, const CorrelationSpec& corr,
                                const GridMap& map);

/// Cached detection model for one object class. Per-pose tables are built on
/// first use and are safe to read from several threads.
class DetectionModel {
 public:
  DetectionModel(std::shared_ptr<const VisibilityMap> visibility, DetectorParams params);

  const DetectorParams& params() const { return params_; }
  const GridMap& map() const { return vis_->map(); }
  const VisibilityMap& visibility() const { return *vis_; }

  /// `z` and `x` are cell indices; z < 0 is null.
  double likelihood(int z, int x, const Pose& pose) const;
  double null_probability(int x, const Pose& pose) const { return likelihood(-1, x, pose); }
  /// Likelihood of `z` shared by every object location outside the view.
  double likelihood_out_of_view(int z, const Pose& pose) const;
  /// Returns a cell index or -1 for null.
  int sample(int x, const Pose& pose, Rng& rng) const;

 private:
  struct Frame {
    std::vector<int> visible;
    std::vector<double> delta;
    std::vector<double> delta_cdf;
    double fp_scale = 0.0;
    double out_null = 1.0;
    double out_norm = 1.0;
    std::vector<double> in_norm;
    std::vector<double> gauss_norm;
  };
  struct DiskOffset {
    int dc;
    int dr;
    double g;
  };

  const Frame& frame(const Pose& pose) const;
  Frame build_frame(const Pose& pose) const;
  int slot(const Frame& f, int cell) const;
  double gaussian(Cell a, Cell b) const;
  bool in_disk(Cell a, Cell b) const;

  std::shared_ptr<const VisibilityMap> vis_;
  DetectorParams params_;
  double disk_radius_sq_ = 0.0;  ///< in cells^2
  std::vector<DiskOffset> disk_;
  mutable std::vector<Frame> frames_;
  mutable std::unique_ptr<std::once_flag[]> once_;
};

/// Normalized close/far correlation C(x_i | x_target) over the free cells.
class CorrelationModel {
 public:
  CorrelationModel(const GridMap& map, CorrelationSpec spec);

  const CorrelationSpec& spec() const { return spec_; }
  bool related(Cell x_i, Cell x_target) const {
    return correlation_prob(x_i, x_target, spec_, cell_size_) == 1;
  }
  /// Number of free cells related to the target cell index.
  int support_size(int target_index) const { return support_[target_index]; }
  double probability(Cell x_i, Cell x_target, const GridMap& map) const;
  /// Uniform draw from the support of `x_target`.
  Cell sample(Cell x_target, const GridMap& map, Rng& rng) const;
  /// True iff every free cell has a nonempty support.
  bool well_formed(const GridMap& map) const;

 private:
  CorrelationSpec spec_;
  double cell_size_;
  std::vector<Cell> free_;
  std::vector<int> support_;
};

/// Pr(z | x_target, pose) for every cell index (zero on obstacles), computed
/// by splitting the sum into visible and out-of-view object locations.
std::vector<double> correlational_likelihoods(int z, const Pose& pose, const DetectionModel& det,
                                              const CorrelationModel& corr);

}  // namespace cospomdp
