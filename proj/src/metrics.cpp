#include "satsynth/error.hpp"
#include "satsynth/pose_eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace satsynth {

double rotation_error(const Quaternion& a, const Quaternion& b) {
  // 2 acos(|<a, b>|) evaluated as 2 atan2(|vec(a* b)|, |<a, b>|): acos loses
  // half the digits near 0. Each component is grouped so that swapping or
  // negating the arguments only flips signs, and q vs -q cancels exactly.
  const auto [ax, ay, az, aw] = a.xyzw();
  const auto [bx, by, bz, bw] = b.xyzw();
  const double vx = (aw * bx - bw * ax) - (ay * bz - az * by);
  const double vy = (aw * by - bw * ay) - (az * bx - ax * bz);
  const double vz = (aw * bz - bw * az) - (ax * by - ay * bx);
  const double w = std::abs(ax * bx + ay * by + az * bz + aw * bw);
  return 2.0 * std::atan2(std::hypot(vx, vy, vz), w);
}

Scores compute_scores(const Pose& estimate, const Pose& truth) {
  const double norm = truth.translation.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ground-truth translation has zero norm");
  }
  Scores s;
  s.e_v = (estimate.translation - truth.translation).norm();
  s.e_q = rotation_error(estimate.rotation, truth.rotation);
  s.s_v = s.e_v / norm;
  if (s.s_v < kTranslationScoreThreshold) s.s_v = 0.0;
  s.s_q = s.e_q < kRotationScoreThreshold ? 0.0 : s.e_q;
  s.s = s.s_v + s.s_q;
  return s;
}

std::string EvaluationReport::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "frame,E_v,E_q,S_v,S_q,S\n";
  for (const FrameScore& f : frames) {
    const Scores& s = f.scores;
    out << f.frame << ',' << s.e_v << ',' << s.e_q << ',' << s.s_v << ',' << s.s_q << ',' << s.s
        << '\n';
  }
  out << "mean," << mean_e_v << ',' << mean_e_q << ',' << mean_s_v << ',' << mean_s_q << ','
      << mean_s << '\n';
  return out.str();
}

namespace {

std::string join(const std::vector<std::string>& ids) {
  std::string s;
  for (const std::string& id : ids) s += (s.empty() ? "" : ", ") + id;
  return s;
}

}  // namespace

EvaluationReport evaluate_dataset(std::span<const FramePose> truth,
                                  std::span<const FramePose> estimates) {
  std::map<std::string, const Pose*> est;
  std::vector<std::string> duplicated;
  for (const FramePose& e : estimates) {
    if (!est.emplace(e.frame, &e.pose).second) duplicated.push_back(e.frame);
  }
  if (!duplicated.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate estimates for frames: " + join(duplicated));
  }

  std::set<std::string> known;
  std::vector<std::string> missing;
  for (const FramePose& t : truth) {
    known.insert(t.frame);
    if (!est.count(t.frame)) missing.push_back(t.frame);
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    throw Error(ErrorCode::kMissingFrames, "no estimate for frames: " + join(missing));
  }
  std::vector<std::string> unknown;
  for (const auto& [id, pose] : est) {
    if (!known.count(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "estimates for unknown frames: " + join(unknown));
  }

  EvaluationReport report;
  for (const FramePose& t : truth) {
    report.frames.push_back({t.frame, compute_scores(*est.at(t.frame), t.pose)});
  }
  std::sort(report.frames.begin(), report.frames.end(),
            [](const FrameScore& a, const FrameScore& b) { return a.frame < b.frame; });
  if (!report.frames.empty()) {
    for (const FrameScore& f : report.frames) {
      report.mean_e_v += f.scores.e_v;
      report.mean_e_q += f.scores.e_q;
      report.mean_s_v += f.scores.s_v;
      report.mean_s_q += f.scores.s_q;
      report.mean_s += f.scores.s;
    }
    const double count = static_cast<double>(report.frames.size());
    report.mean_e_v /= count;
    report.mean_e_q /= count;
    report.mean_s_v /= count;
    report.mean_s_q /= count;
    report.mean_s /= count;
  }
  return report;
}

EvaluationReport evaluate_dataset(const DatasetManifest& manifest,
                                  std::span<const FramePose> estimates) {
  std::vector<FramePose> truth;
  truth.reserve(manifest.frames.size());
  for (const ManifestFrame& f : manifest.frames) truth.push_back({f.id, f.pose});
  return evaluate_dataset(truth, estimates);
}

}  // namespace satsynth
