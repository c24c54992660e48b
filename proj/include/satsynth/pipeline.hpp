#pragma once

#include "satsynth/bvh.hpp"
#include "satsynth/image.hpp"
#include "satsynth/labels.hpp"
#include "satsynth/mesh.hpp"
#include "satsynth/renderer.hpp"
#include "satsynth/scene.hpp"

#include <cstdint>
#include <optional>

namespace satsynth {

/// Encoded intensity images requested by the scene's output flags.
struct FrameImages {
  std::optional<ByteImage> rgb;
  std::optional<ByteImage> gray;
};

/// Applies the sensor effects to the linear color buffer and encodes it.
/// The grayscale image is the luma of the same post-effect RGB image.
FrameImages finish_images(const FrameBuffers& buffers, const SceneConfig& scene,
                          const FrameKey& key);

struct LabeledFrame {
  GroundTruthBundle ground_truth;
  std::optional<HeatmapTensor> heatmaps;
  FrameImages images;
};

/// Labels (and heatmaps when enabled) from a frame's buffers.
LabeledFrame label_frame(const FrameBuffers& buffers, const Pose& pose, const SceneConfig& scene,
                         const KeypointSet& keypoints, double heatmap_sigma);

/// Render + effects + labels for one pose.
LabeledFrame render_labeled_frame(const Mesh& mesh, const Bvh& bvh, const KeypointSet& keypoints,
                                  const Pose& pose, const SceneConfig& scene, const FrameKey& key,
                                  double heatmap_sigma, const RenderOptions& options = {});

}  // namespace satsynth
