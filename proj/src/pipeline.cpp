#include "satsynth/pipeline.hpp"

#include "satsynth/effects.hpp"
#include "satsynth/groundtruth.hpp"

namespace satsynth {

FrameImages finish_images(const FrameBuffers& fb, const SceneConfig& scene, const FrameKey& key) {
  FrameImages out;
  if (!scene.outputs.rgb && !scene.outputs.gray) return out;
  ImageF linear(fb.width, fb.height, 3);
  linear.data = fb.color;
  const ImageF processed =
      apply_effects(linear, scene.effects, false, key.seed, frame_stream_key(key));
  if (scene.outputs.rgb) out.rgb = encode_8bit(processed);
  if (scene.outputs.gray) out.gray = encode_8bit(to_grayscale(processed));
  return out;
}

LabeledFrame label_frame(const FrameBuffers& fb, const Pose& pose, const SceneConfig& scene,
                         const KeypointSet& keypoints, double heatmap_sigma) {
  LabeledFrame out;
  out.ground_truth = extract_labels(fb, pose, scene.camera, keypoints);
  if (!scene.outputs.bbox) out.ground_truth.bbox.reset();
  if (scene.outputs.heatmaps && keypoints.size() > 0) {
    out.heatmaps = make_heatmaps(out.ground_truth.keypoints2d, fb.width, fb.height, heatmap_sigma);
  }
  return out;
}

LabeledFrame render_labeled_frame(const Mesh& mesh, const Bvh& bvh, const KeypointSet& keypoints,
                                  const Pose& pose, const SceneConfig& scene, const FrameKey& key,
                                  double heatmap_sigma, const RenderOptions& options) {
  RenderOptions opts = options;
  opts.geometry_only = !scene.outputs.rgb && !scene.outputs.gray;
  const FrameBuffers fb = render_frame(mesh, bvh, pose, scene, key, opts);
  LabeledFrame out = label_frame(fb, pose, scene, keypoints, heatmap_sigma);
  out.images = finish_images(fb, scene, key);
  return out;
}

}  // namespace satsynth
