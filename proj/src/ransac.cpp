#include "satsynth/error.hpp"
#include "satsynth/groundtruth.hpp"
#include "satsynth/pose_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

namespace satsynth {

void validate(const RansacConfig& cfg) {
  if (!(cfg.inlier_threshold_px > 0.0) || !std::isfinite(cfg.inlier_threshold_px)) {
    throw Error(ErrorCode::kInvalidArgument, "ransac inlier threshold must be > 0");
  }
  if (cfg.max_iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "ransac max_iterations must be >= 1");
  }
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ransac confidence must be in (0, 1)");
  }
}

namespace {

struct Consensus {
  std::vector<int> inliers;  // indices into the correspondence list
  double error = std::numeric_limits<double>::infinity();

  bool better_than(const Consensus& rhs) const {
    if (inliers.size() != rhs.inliers.size()) return inliers.size() > rhs.inliers.size();
    return error < rhs.error;
  }
};

Consensus score(const Pose& pose, std::span<const Correspondence> corr,
                const CameraModel& camera, double threshold) {
  Consensus c;
  c.error = 0.0;
  for (std::size_t i = 0; i < corr.size(); ++i) {
    if (!(pose.transform(corr[i].point).z() > 1e-9)) continue;
    const Projection p = project_point(camera, pose, corr[i].point);
    const double e = std::hypot(p.u - corr[i].pixel.x(), p.v - corr[i].pixel.y());
    if (e <= threshold) {
      c.inliers.push_back(static_cast<int>(i));
      c.error += e;
    }
  }
  return c;
}

int required_iterations(std::size_t inliers, std::size_t total, double confidence, int cap) {
  const double w = static_cast<double>(inliers) / static_cast<double>(total);
  const double all_good = std::pow(w, 4);
  if (all_good >= 1.0) return 1;
  if (all_good <= 0.0) return cap;
  const double k = std::log(1.0 - confidence) / std::log(1.0 - all_good);
  if (!std::isfinite(k) || k >= cap) return cap;
  return std::max(1, static_cast<int>(std::ceil(k)));
}

std::optional<Pose> try_epnp(std::span<const Correspondence> corr, const CameraModel& camera) {
  try {
    return epnp(corr, camera);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateConfiguration) return std::nullopt;
    throw;
  }
}

}  // namespace

RansacResult ransac_pnp(std::span<const Correspondence> corr, const CameraModel& camera,
                        const RansacConfig& cfg) {
  validate(cfg);
  const std::size_t n = corr.size();
  if (n < 4) {
    std::ostringstream msg;
    msg << "ransac needs at least 4 correspondences, got " << n;
    throw Error(ErrorCode::kInsufficientCorrespondences, msg.str());
  }
  // Hypotheses are fitted on ideal pinhole pixels; scoring uses the
  // measured pixels against the distorting projection.
  std::vector<Correspondence> ideal(corr.begin(), corr.end());
  for (Correspondence& c : ideal) {
    if (!c.pixel.allFinite() || !c.point.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "ransac: non-finite correspondence");
    }
    c.pixel = camera.undistort_pixel(c.pixel.x(), c.pixel.y());
  }

  Rng rng(cfg.seed, static_cast<std::uint64_t>(StreamDomain::kRansac));
  std::vector<std::size_t> index(n);
  Consensus best;
  Pose best_pose;
  int needed = cfg.max_iterations;
  int it = 0;
  for (; it < needed; ++it) {
    std::iota(index.begin(), index.end(), 0);
    std::vector<Correspondence> sample;
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t pick = j + rng.below(n - j);
      std::swap(index[j], index[pick]);
      sample.push_back(ideal[index[j]]);
    }
    const std::optional<Pose> pose = try_epnp(sample, camera);
    if (!pose) continue;
    Consensus c = score(*pose, corr, camera, cfg.inlier_threshold_px);
    if (!c.inliers.empty() && c.better_than(best)) {
      best = std::move(c);
      best_pose = *pose;
      needed = std::min(needed, required_iterations(best.inliers.size(), n, cfg.confidence,
                                                    cfg.max_iterations));
    }
  }

  if (best.inliers.size() < 4) {
    std::ostringstream msg;
    msg << "ransac found no consensus: best hypothesis had " << best.inliers.size()
        << " inliers of " << n;
    throw Error(ErrorCode::kNoConsensus, msg.str());
  }

  std::vector<Correspondence> support;
  for (int i : best.inliers) support.push_back(ideal[i]);
  if (const std::optional<Pose> refit = try_epnp(support, camera)) {
    Consensus c = score(*refit, corr, camera, cfg.inlier_threshold_px);
    if (c.inliers.size() >= best.inliers.size()) {
      best = std::move(c);
      best_pose = *refit;
    }
  }

  RansacResult result;
  result.pose = best_pose;
  result.iterations = it;
  for (int i : best.inliers) result.inlier_ids.push_back(corr[i].id);
  std::sort(result.inlier_ids.begin(), result.inlier_ids.end());
  return result;
}

}  // namespace satsynth
