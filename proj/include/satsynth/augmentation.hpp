#pragma once

#include "satsynth/pipeline.hpp"
#include "satsynth/scene.hpp"

#include <cstdint>
#include <vector>

namespace satsynth {

/// Appearance jitter applied per variant. All-zero jitter reproduces the
/// base scene exactly.
struct AugmentationPlan {
  int k = 3;
  /// Light directions are redrawn uniformly inside this cone (radians).
  double light_cone_half_angle = 0.0;
  /// Light intensities are scaled log-uniformly within [min, max].
  double intensity_scale_min = 1.0;
  double intensity_scale_max = 1.0;
  /// Switches image backgrounds to per-variant random placement.
  bool background_shuffle = false;
  /// Probability of flipping each switch relative to the base scene.
  double material_toggle_probability = 0.0;
  double noise_toggle_probability = 0.0;
  double bloom_toggle_probability = 0.0;
  double color_toggle_probability = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const AugmentationPlan&) const = default;
};

void validate(const AugmentationPlan& plan);

/// K appearance variants of `base` for the pose identified by `stream`.
/// Only lights, the material-quality switch, background placement and effect
/// switches change.
std::vector<SceneConfig> make_variants(const SceneConfig& base, const AugmentationPlan& plan,
                                       std::uint64_t stream);

struct AugmentedFrame {
  /// From a geometry-only pass shared by every variant.
  GroundTruthBundle ground_truth;
  std::optional<HeatmapTensor> heatmaps;
  /// One entry per variant, in order.
  std::vector<FrameImages> images;
};

/// Renders every variant of one pose. `key.variant` is ignored; variant i is
/// rendered with variant id i.
AugmentedFrame render_augmented(const Mesh& mesh, const Bvh& bvh, const KeypointSet& keypoints,
                                const Pose& pose, const std::vector<SceneConfig>& variants,
                                const FrameKey& key, double heatmap_sigma,
                                const RenderOptions& options = {});

}  // namespace satsynth
