#include "satsynth/groundtruth.hpp"
#include "satsynth/pose_sampling.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace satsynth;
using satsynth::test::error_message;

namespace {

const CameraModel kCamera(512, 512, 768, 768, 256, 256);

double angle_to_identity(const Quaternion& q) { return 2.0 * std::acos(std::min(1.0, std::abs(q.w()))); }

// Kolmogorov distance between samples of the rotation angle and the
// Haar law, whose CDF is (theta - sin theta) / pi.
double angle_ks(std::vector<double> angles) {
  std::sort(angles.begin(), angles.end());
  const double n = static_cast<double>(angles.size());
  double d = 0.0;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double f = (angles[i] - std::sin(angles[i])) / std::numbers::pi;
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  return d;
}

}  // namespace

TEST(UniformRotation, UnitNorm) {
  Rng rng = Rng::derive(1, StreamDomain::kPose);
  for (int i = 0; i < 10000; ++i) {
    const Quaternion q = sample_uniform_rotation(rng);
    EXPECT_NEAR(std::sqrt(q.dot(q)), 1.0, 1e-12);
  }
}

TEST(UniformRotation, MeanAbsWMatchesHaarMarginal) {
  Rng rng(42, 0);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += std::abs(sample_uniform_rotation(rng).w());
  EXPECT_NEAR(sum / 10000, 4.0 / (3.0 * std::numbers::pi), 0.01);
}

TEST(UniformRotation, AngleDistributionMatchesHaarCdf) {
  Rng rng(42, 0);
  std::vector<double> angles;
  for (int i = 0; i < 10000; ++i) angles.push_back(angle_to_identity(sample_uniform_rotation(rng)));
  EXPECT_LT(angle_ks(angles), 0.02);
}

TEST(UniformRotation, LeftInvariance) {
  // Angle to a fixed reference r has the same law as the angle to identity.
  Rng rng(5, 0);
  std::mt19937_64 gen(11);
  const Quaternion r = test::random_rotation(gen);
  std::vector<double> to_ref, to_id;
  for (int i = 0; i < 10000; ++i) {
    const Quaternion q = sample_uniform_rotation(rng);
    to_id.push_back(angle_to_identity(q));
    to_ref.push_back(angle_to_identity(r.conjugate() * q));
  }
  EXPECT_LT(angle_ks(to_ref), 0.02);
  EXPECT_LT(angle_ks(to_id), 0.02);
}

TEST(SamplePose, DegenerateRangePinsTranslation) {
  PoseSamplerConfig cfg;
  cfg.z_min = cfg.z_max = 5.0;
  cfg.lateral_margin = 1.0;
  Rng rng(1, 0);
  for (int i = 0; i < 10; ++i) {
    const Pose p = sample_pose(cfg, kCamera, rng);
    EXPECT_EQ(p.translation, Vec3(0, 0, 5));
  }
}

TEST(SamplePose, ZeroMarginProjectsInBounds) {
  PoseSamplerConfig cfg;
  cfg.lateral_margin = 0.0;
  Rng rng(3, 0);
  double umin = 1e9, umax = -1e9;
  for (int i = 0; i < 1000; ++i) {
    const Pose p = sample_pose(cfg, kCamera, rng);
    EXPECT_GE(p.translation.z(), cfg.z_min);
    EXPECT_LE(p.translation.z(), cfg.z_max);
    const Projection pr = project_point(kCamera, p, Vec3::Zero());
    EXPECT_TRUE(kCamera.in_bounds(pr.u, pr.v)) << pr.u << ", " << pr.v;
    umin = std::min(umin, pr.u);
    umax = std::max(umax, pr.u);
  }
  // Spread covers most of the image width.
  EXPECT_LT(umin, 30.0);
  EXPECT_GT(umax, 482.0);
}

TEST(SamplePose, MarginShrinksWindow) {
  PoseSamplerConfig cfg;
  cfg.lateral_margin = 0.5;
  Rng rng(4, 0);
  for (int i = 0; i < 1000; ++i) {
    const Projection pr = project_point(kCamera, sample_pose(cfg, kCamera, rng), Vec3::Zero());
    EXPECT_GE(pr.u, 128.0 - 1e-9);
    EXPECT_LE(pr.u, 384.0 + 1e-9);
    EXPECT_GE(pr.v, 128.0 - 1e-9);
    EXPECT_LE(pr.v, 384.0 + 1e-9);
  }
}

TEST(SamplePose, DeterministicPerFrame) {
  PoseSamplerConfig cfg;
  cfg.seed = 77;
  for (std::uint64_t i = 0; i < 20; ++i) {
    EXPECT_EQ(sample_pose_for_frame(cfg, kCamera, i), sample_pose_for_frame(cfg, kCamera, i));
  }
  EXPECT_FALSE(sample_pose_for_frame(cfg, kCamera, 0) == sample_pose_for_frame(cfg, kCamera, 1));
  Rng a(5, 0), b(5, 0);
  EXPECT_EQ(sample_pose(cfg, kCamera, a), sample_pose(cfg, kCamera, b));
}

TEST(SamplePose, ValidateRejectsBadRanges) {
  PoseSamplerConfig cfg;
  cfg.z_min = 0.0;
  EXPECT_ERROR_CODE(validate(cfg), ErrorCode::kInvalidArgument);
  cfg.z_min = 5;
  cfg.z_max = 4;
  EXPECT_ERROR_CODE(validate(cfg), ErrorCode::kInvalidArgument);
  cfg.z_max = 6;
  cfg.lateral_margin = 1.5;
  EXPECT_ERROR_CODE(validate(cfg), ErrorCode::kInvalidArgument);
}

TEST(PoseFile, IdentityRecord) {
  const auto poses = parse_poses(R"([{"frame": "a", "q": [0, 0, 0, 1], "v": [0, 0, 10]}])");
  ASSERT_EQ(poses.size(), 1u);
  EXPECT_EQ(poses[0].frame, "a");
  EXPECT_EQ(poses[0].pose.rotation, Quaternion());
  EXPECT_EQ(poses[0].pose.translation, Vec3(0, 0, 10));
}

TEST(PoseFile, SlightlyNonUnitIsRenormalized) {
  const auto poses = parse_poses(R"([{"frame": "a", "q": [0, 0, 0, 1.001], "v": [0, 0, 10]}])");
  EXPECT_NEAR(poses[0].pose.rotation.w(), 1.0, 1e-15);
}

TEST(PoseFile, FarFromUnitIsRejected) {
  const std::string text =
      R"([{"frame": "a", "q": [0, 0, 0, 1], "v": [0, 0, 1]}, {"frame": "b", "q": [0, 0, 0, 0.5], "v": [0, 0, 1]}])";
  const std::string msg = error_message([&] { parse_poses(text); });
  EXPECT_NE(msg.find("quaternion norm outside tolerance"), std::string::npos) << msg;
  EXPECT_NE(msg.find("record 1"), std::string::npos) << msg;
  EXPECT_ERROR_CODE(parse_poses(text), ErrorCode::kParse);
}

TEST(PoseFile, MalformedRecordsNameIndex) {
  for (const char* text : {
           R"([{"frame": "a", "q": [0, 0, 1], "v": [0, 0, 1]}])",
           R"([{"frame": "a", "q": [0, 0, 0, 1]}])",
           R"([{"q": [0, 0, 0, 1], "v": [0, 0, 1]}])",
           R"([{"frame": "a", "q": [0, 0, 0, 1], "v": [0, 0, "x"]}])",
           R"([{"frame": "a", "q": [0, 0, 0, 1], "v": [0, 0, 1], "extra": 1}])",
       }) {
    const std::string msg = error_message([&] { parse_poses(text); });
    EXPECT_NE(msg.find("record 0"), std::string::npos) << text << " -> " << msg;
  }
  EXPECT_ERROR_CODE(parse_poses("{}"), ErrorCode::kParse);
  EXPECT_ERROR_CODE(parse_poses("[{"), ErrorCode::kParse);
}

TEST(PoseFile, NonFiniteRejected) {
  // JSON has no literal for infinity; an overflowing number parses to inf.
  EXPECT_ERROR_CODE(parse_poses(R"([{"frame": "a", "q": [0, 0, 0, 1], "v": [0, 0, 1e999]}])"),
                    ErrorCode::kParse);
}

TEST(PoseFile, EmptyListRoundTrip) {
  test::TempDir dir("poses");
  save_poses({}, dir / "p.json");
  EXPECT_TRUE(load_poses(dir / "p.json").empty());
}

TEST(PoseFile, RoundTripIsBitExact) {
  test::TempDir dir("poses");
  PoseSamplerConfig cfg;
  std::vector<FramePose> poses;
  Rng rng(123, 0);
  for (int i = 0; i < 10000; ++i) {
    poses.push_back({"f" + std::to_string(i), sample_pose(cfg, kCamera, rng)});
  }
  save_poses(poses, dir / "p.json");
  const auto back = load_poses(dir / "p.json");
  ASSERT_EQ(back.size(), poses.size());
  double max_delta = 0.0;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    EXPECT_EQ(back[i].frame, poses[i].frame);
    const auto a = back[i].pose.rotation.xyzw(), b = poses[i].pose.rotation.xyzw();
    for (int k = 0; k < 4; ++k) max_delta = std::max(max_delta, std::abs(a[k] - b[k]));
    max_delta = std::max(max_delta, (back[i].pose.translation - poses[i].pose.translation).cwiseAbs().maxCoeff());
  }
  EXPECT_EQ(max_delta, 0.0);
}

TEST(PoseFile, MissingFileIsIoError) {
  EXPECT_ERROR_CODE(load_poses("/nonexistent/poses.json"), ErrorCode::kIo);
}
