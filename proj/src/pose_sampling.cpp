#include "satsynth/pose_sampling.hpp"

#include "json_util.hpp"

#include <cmath>
#include <numbers>

namespace satsynth {

void validate(const PoseSamplerConfig& cfg) {
  if (!(cfg.z_min > 0.0) || !(cfg.z_min <= cfg.z_max) || !std::isfinite(cfg.z_max)) {
    throw Error(ErrorCode::kInvalidArgument, "sampler z_range must satisfy 0 < z_min <= z_max");
  }
  if (!(cfg.lateral_margin >= 0.0 && cfg.lateral_margin <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sampler lateral_margin must lie in [0, 1]");
  }
}

Quaternion sample_uniform_rotation(Rng& rng) {
  const double s = rng.uniform();
  const double sigma1 = std::sqrt(1.0 - s);
  const double sigma2 = std::sqrt(s);
  const double theta1 = 2.0 * std::numbers::pi * rng.uniform();
  const double theta2 = 2.0 * std::numbers::pi * rng.uniform();
  return Quaternion::normalized(std::sin(theta1) * sigma1, std::cos(theta1) * sigma1,
                                std::sin(theta2) * sigma2, std::cos(theta2) * sigma2);
}

Pose sample_pose(const PoseSamplerConfig& cfg, const CameraModel& camera, Rng& rng) {
  validate(cfg);
  Pose pose;
  pose.rotation = sample_uniform_rotation(rng);
  const double z = cfg.z_min == cfg.z_max ? cfg.z_min : rng.uniform(cfg.z_min, cfg.z_max);
  const double keep = 1.0 - cfg.lateral_margin;
  const double u_full = rng.uniform(0.0, camera.width());
  const double v_full = rng.uniform(0.0, camera.height());
  const double u = camera.cx() + keep * (u_full - camera.cx());
  const double v = camera.cy() + keep * (v_full - camera.cy());
  const Vec2 n = camera.pixel_to_normalized(u, v);
  pose.translation = Vec3(z * n.x(), z * n.y(), z);
  return pose;
}

Pose sample_pose_for_frame(const PoseSamplerConfig& cfg, const CameraModel& camera,
                           std::uint64_t index) {
  Rng rng = Rng::derive(cfg.seed, StreamDomain::kPose, index);
  return sample_pose(cfg, camera, rng);
}

std::vector<FramePose> parse_poses(const std::string& text) {
  const detail::Json doc = detail::parse_json(text, "pose file");
  if (!doc.is_array()) throw Error(ErrorCode::kParse, "pose file: expected a top-level array");
  std::vector<FramePose> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string context = "pose record " + std::to_string(i);
    const detail::Json& rec = doc[i];
    if (!rec.is_object() || !rec.contains("frame") || !rec["frame"].is_string()) {
      throw Error(ErrorCode::kParse, context + ": missing string field \"frame\"");
    }
    detail::reject_unknown_keys(rec, {"frame", "q", "v"}, context, ErrorCode::kParse);
    out.push_back({rec["frame"].get<std::string>(),
                   detail::pose_from_json(rec, context, kPoseFileNormTolerance)});
  }
  return out;
}

std::vector<FramePose> load_poses(const std::filesystem::path& path) {
  return parse_poses(detail::read_text_file(path));
}

std::string format_poses(const std::vector<FramePose>& poses) {
  detail::Json doc = detail::Json::array();
  for (const FramePose& fp : poses) {
    detail::Json rec = detail::pose_to_json(fp.pose);
    rec["frame"] = fp.frame;
    doc.push_back(std::move(rec));
  }
  return detail::dump(doc);
}

void save_poses(const std::vector<FramePose>& poses, const std::filesystem::path& path) {
  detail::write_text_file_atomic(path, format_poses(poses));
}

}  // namespace satsynth
