#pragma once

#include "satsynth/camera.hpp"
#include "satsynth/geometry.hpp"
#include "satsynth/labels.hpp"
#include "satsynth/manifest.hpp"
#include "satsynth/pose_sampling.hpp"
#include "satsynth/rng.hpp"

#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace satsynth {

// ---------------------------------------------------------------------------
// Heatmap decoding and synthetic detections

struct DecodedKeypoint {
  int id = 0;
  double u = 0.0;
  double v = 0.0;
  float score = 0.0f;
};

/// Per channel, the pixel center of the maximum; ties go to the lowest
/// row-major index.
std::vector<DecodedKeypoint> decode_heatmaps(const HeatmapTensor& tensor);

/// Gaussian displacement of every keypoint, and with probability
/// `outlier_rate` replacement by a uniform point in [0, width) x [0, height).
/// Keypoints with non-finite coordinates are passed through.
std::vector<Keypoint2D> perturb_detections(const std::vector<Keypoint2D>& truth,
                                           double noise_sigma, double outlier_rate, int width,
                                           int height, Rng& rng);

// ---------------------------------------------------------------------------
// Perspective-n-point

struct Correspondence {
  int id = 0;
  Vec2 pixel = Vec2::Zero();
  Vec3 point = Vec3::Zero();
};

/// EPnP on pinhole (already undistorted) pixel coordinates. Uses three
/// control points when the points are coplanar. Throws
/// kInsufficientCorrespondences below 4 points, kDegenerateConfiguration
/// when the points are collinear or coincident.
Pose epnp(std::span<const Correspondence> correspondences, const CameraModel& camera);

struct RansacConfig {
  double inlier_threshold_px = 4.0;
  int max_iterations = 1000;
  double confidence = 0.999;
  std::uint64_t seed = 0;
};

void validate(const RansacConfig& cfg);

struct RansacResult {
  Pose pose;
  /// Keypoint ids of the final inlier set, ascending.
  std::vector<int> inlier_ids;
  int iterations = 0;
};

/// Minimal 4-point EPnP hypotheses with inliers counted by reprojection error
/// in the measured (distorted) pixel domain, then a refit on all inliers.
/// `correspondences` carry measured pixels. Throws kNoConsensus when no
/// hypothesis reaches 4 inliers.
RansacResult ransac_pnp(std::span<const Correspondence> correspondences,
                        const CameraModel& camera, const RansacConfig& cfg);

// ---------------------------------------------------------------------------
// Scoring

inline constexpr double kTranslationScoreThreshold = 2.173e-3;
inline constexpr double kRotationScoreThresholdDeg = 0.169;
inline constexpr double kRotationScoreThreshold = kRotationScoreThresholdDeg * std::numbers::pi / 180.0;

struct Scores {
  double e_v = 0.0;  ///< meters
  double e_q = 0.0;  ///< radians
  double s_v = 0.0;
  double s_q = 0.0;
  double s = 0.0;
};

/// Rotation angle between two quaternions, 2 acos(|<a, b>|), in [0, pi].
double rotation_error(const Quaternion& a, const Quaternion& b);

/// Translation and orientation errors and the thresholded scores. Throws
/// kInvalidArgument when the ground-truth translation is zero.
Scores compute_scores(const Pose& estimate, const Pose& truth);

struct FrameScore {
  std::string frame;
  Scores scores;
};

struct EvaluationReport {
  std::vector<FrameScore> frames;  ///< sorted by frame id
  double mean_e_v = 0.0;
  double mean_e_q = 0.0;
  double mean_s_v = 0.0;
  double mean_s_q = 0.0;
  double mean_s = 0.0;

  /// Columns frame,E_v,E_q,S_v,S_q,S and a final "mean" row.
  std::string to_csv() const;
};

/// Scores every ground-truth frame against its estimate. Throws
/// kMissingFrames listing ids without an estimate, and kInvalidArgument for
/// estimates of unknown or duplicated frames.
EvaluationReport evaluate_dataset(std::span<const FramePose> truth,
                                  std::span<const FramePose> estimates);
EvaluationReport evaluate_dataset(const DatasetManifest& manifest,
                                  std::span<const FramePose> estimates);

}  // namespace satsynth
