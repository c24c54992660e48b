#pragma once

#include "satsynth/camera.hpp"
#include "satsynth/geometry.hpp"
#include "satsynth/labels.hpp"
#include "satsynth/renderer.hpp"

#include <vector>

namespace satsynth {

struct Projection {
  double u = 0.0;
  double v = 0.0;
  /// Camera-frame depth of the point.
  double z = 0.0;
};

/// Perspective projection with forward lens distortion. Throws kBehindCamera
/// when the camera-frame z is not above 1e-9.
Projection project_point(const CameraModel& camera, const Pose& pose, const Vec3& model_point);

/// Keypoints closer to the camera than the surface by more than this are
/// occluded.
inline constexpr double kKeypointOcclusionSlack = 0.005;

/// Turns raw buffers into labels. Keypoints behind the camera get NaN pixel
/// coordinates and visible = false. A keypoint is visible when it projects
/// in bounds onto (or next to) the surface and is not behind it by more than
/// the slack; keypoints with no surface within 1 px are not visible.
GroundTruthBundle extract_labels(const FrameBuffers& buffers, const Pose& pose,
                                 const CameraModel& camera, const KeypointSet& keypoints);

/// Amplitude-1 Gaussians evaluated at pixel centers over the full image.
/// Keypoints with non-finite coordinates give an all-zero channel.
HeatmapTensor make_heatmaps(const std::vector<Keypoint2D>& keypoints, int width, int height,
                            double sigma);

/// Mean squared difference over all N*M*C elements. Throws kInvalidArgument
/// on shape mismatch.
double heatmap_mse(const HeatmapTensor& predicted, const HeatmapTensor& target);

}  // namespace satsynth
