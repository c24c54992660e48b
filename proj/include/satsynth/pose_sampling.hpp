#pragma once

#include "satsynth/camera.hpp"
#include "satsynth/geometry.hpp"
#include "satsynth/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace satsynth {

struct PoseSamplerConfig {
  double z_min = 4.0;
  double z_max = 10.0;
  /// Fraction of the frustum excluded around the image border, in [0, 1].
  double lateral_margin = 0.2;
  std::uint64_t seed = 42;
};

void validate(const PoseSamplerConfig& cfg);

/// Haar-uniform rotation from three uniforms (subgroup algorithm).
Quaternion sample_uniform_rotation(Rng& rng);

/// Random pose: uniform rotation, depth uniform in [z_min, z_max], and a
/// lateral offset such that the model origin projects uniformly into the
/// window that shrinks from the full image (margin 0) to the principal
/// point (margin 1).
Pose sample_pose(const PoseSamplerConfig& cfg, const CameraModel& camera, Rng& rng);

/// Pose for frame `index`, drawn from its own derived stream.
Pose sample_pose_for_frame(const PoseSamplerConfig& cfg, const CameraModel& camera,
                           std::uint64_t index);

struct FramePose {
  std::string frame;
  Pose pose;
  bool operator==(const FramePose&) const = default;
};

/// Quaternions are accepted within this distance of unit norm and renormalized.
inline constexpr double kPoseFileNormTolerance = 1e-3;

/// Reads `[{"frame": ..., "q": [x,y,z,w], "v": [x,y,z]}, ...]`. Throws kParse
/// naming the record index. Order is preserved.
std::vector<FramePose> load_poses(const std::filesystem::path& path);
std::vector<FramePose> parse_poses(const std::string& text);

/// Writes doubles in shortest round-trip form, so loading the file back
/// reproduces every component bit-for-bit.
void save_poses(const std::vector<FramePose>& poses, const std::filesystem::path& path);
std::string format_poses(const std::vector<FramePose>& poses);

}  // namespace satsynth
