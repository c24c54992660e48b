#include "satsynth/dataset_io.hpp"

#include "json_util.hpp"
#include "satsynth/error.hpp"
#include "satsynth/groundtruth.hpp"
#include "satsynth/image_io.hpp"
#include "satsynth/pose_eval.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace satsynth {

namespace {

namespace fs = std::filesystem;

struct FrameCheck {
  const DatasetManifest& manifest;
  const fs::path& root;
  const KeypointSet* keypoints;
  CheckReport& report;

  void problem(const std::string& frame, const std::string& what) {
    report.problems.push_back("frame " + frame + ": " + what);
  }

  // Resolves a manifest path, reporting it when listed but absent.
  bool present(const std::string& frame, const std::string& rel, fs::path& out) {
    if (rel.empty()) return false;
    out = root / rel;
    if (!fs::is_regular_file(out)) {
      problem(frame, "missing file " + rel);
      return false;
    }
    return true;
  }

  void image(const ManifestFrame& f, const std::string& rel, int channels) {
    fs::path p;
    if (!present(f.id, rel, p)) return;
    try {
      const ByteImage img = read_png(p);
      if (img.width != manifest.camera.width() || img.height != manifest.camera.height() ||
          img.channels != channels) {
        problem(f.id, rel + " has unexpected size or channel count");
      }
    } catch (const Error& e) {
      problem(f.id, rel + ": " + e.what());
    }
  }

  void ground_truth(const ManifestFrame& f) {
    const int w = manifest.camera.width(), h = manifest.camera.height();
    const std::size_t pixels = static_cast<std::size_t>(w) * h;
    fs::path depth_p, seg_p, dense_p, labels_p, heat_p;
    std::optional<FloatImage> depth, dense;
    std::optional<ByteImage> seg;
    std::optional<FrameLabels> labels;
    try {
      if (present(f.id, f.depth, depth_p)) depth = read_pfm(depth_p);
      if (present(f.id, f.dense_coords, dense_p)) dense = read_pfm(dense_p);
      if (present(f.id, f.segmentation, seg_p)) seg = read_png(seg_p);
      if (present(f.id, f.labels, labels_p)) labels = parse_labels(detail::read_text_file(labels_p));
    } catch (const Error& e) {
      problem(f.id, e.what());
      return;
    }
    if (depth && (depth->width != w || depth->height != h || depth->channels != 1)) {
      problem(f.id, f.depth + " has the wrong shape");
      return;
    }
    if (dense && (dense->width != w || dense->height != h || dense->channels != 3)) {
      problem(f.id, f.dense_coords + " has the wrong shape");
      return;
    }
    if (seg && (seg->width != w || seg->height != h || seg->channels != 1)) {
      problem(f.id, f.segmentation + " has the wrong shape");
      return;
    }
    if (labels && !(labels->pose == f.pose)) problem(f.id, "label pose differs from the manifest");

    std::size_t mismatches = 0;
    for (std::size_t p = 0; p < pixels; ++p) {
      int votes = 0, voters = 0;
      if (seg) {
        if (seg->data[p] != 0 && seg->data[p] != 255) ++mismatches;
        votes += seg->data[p] == 255;
        ++voters;
      }
      if (depth) {
        votes += std::isfinite(depth->data[p]) && depth->data[p] > 0.0f;
        ++voters;
      }
      if (dense) {
        const float* d = &dense->data[3 * p];
        votes += std::isfinite(d[0]) && std::isfinite(d[1]) && std::isfinite(d[2]);
        ++voters;
      }
      if (votes != 0 && votes != voters) ++mismatches;
    }
    if (mismatches) {
      problem(f.id, std::to_string(mismatches) +
                        " pixels disagree between segmentation, depth and dense coordinates");
    }

    if (dense) {
      for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
          const float* d = &dense->data[3 * (static_cast<std::size_t>(row) * w + col)];
          if (!std::isfinite(d[0]) || !std::isfinite(d[1]) || !std::isfinite(d[2])) continue;
          ++report.foreground_pixels;
          const Vec3 point(d[0], d[1], d[2]);
          if (!(f.pose.transform(point).z() > 1e-9)) continue;
          const Projection proj = project_point(manifest.camera, f.pose, point);
          bool ok = std::hypot(proj.u - (col + 0.5), proj.v - (row + 0.5)) <= kReprojectionTolerancePx;
          if (ok && depth) {
            const double z = depth->data[static_cast<std::size_t>(row) * w + col];
            ok = std::abs(z - proj.z) <= 1e-4 * proj.z;
          }
          report.reprojected_within_tolerance += ok;
        }
      }
    }

    if (labels && keypoints) {
      if (labels->keypoints2d.size() != keypoints->size()) {
        problem(f.id, "label keypoint count differs from the keypoint file");
      } else {
        for (std::size_t i = 0; i < keypoints->size(); ++i) {
          const Vec3& P = keypoints->keypoints()[i].position;
          const Keypoint2D& kp = labels->keypoints2d[i];
          if (!(f.pose.transform(P).z() > 1e-9)) {
            if (std::isfinite(kp.u) || kp.visible) problem(f.id, "behind-camera keypoint labeled");
            continue;
          }
          const Projection proj = project_point(manifest.camera, f.pose, P);
          if (!(std::abs(proj.u - kp.u) <= 1e-6 && std::abs(proj.v - kp.v) <= 1e-6)) {
            problem(f.id, "keypoint " + std::to_string(i) + " label does not match its projection");
          }
        }
      }
    }

    if (present(f.id, f.heatmaps, heat_p)) {
      try {
        const HeatmapTensor tensor = read_heatmaps(heat_p);
        if (tensor.width() != w || tensor.height() != h ||
            (labels && static_cast<std::size_t>(tensor.channels()) != labels->keypoints2d.size())) {
          problem(f.id, f.heatmaps + " has the wrong shape");
        } else if (labels) {
          const auto peaks = decode_heatmaps(tensor);
          for (const DecodedKeypoint& peak : peaks) {
            const Keypoint2D& kp = labels->keypoints2d[peak.id];
            if (!manifest.camera.in_bounds(kp.u, kp.v)) continue;
            if (std::abs(peak.u - kp.u) > 0.5 + 1e-9 || std::abs(peak.v - kp.v) > 0.5 + 1e-9) {
              std::ostringstream msg;
              msg << "heatmap peak of keypoint " << peak.id << " at (" << peak.u << ", " << peak.v
                  << ") is not at its label (" << kp.u << ", " << kp.v << ")";
              problem(f.id, msg.str());
            }
          }
        }
      } catch (const Error& e) {
        problem(f.id, e.what());
      }
    }
  }
};

}  // namespace

CheckReport check_dataset(const fs::path& manifest_path) {
  CheckReport report;
  DatasetManifest manifest;
  try {
    manifest = load_manifest(manifest_path);
  } catch (const Error& e) {
    report.problems.push_back(e.what());
    return report;
  }
  const fs::path root = manifest_path.parent_path();
  std::optional<KeypointSet> keypoints;
  if (!manifest.keypoints.empty()) {
    try {
      keypoints = load_keypoints(root / manifest.keypoints);
    } catch (const Error& e) {
      report.problems.push_back(std::string("keypoints: ") + e.what());
    }
  }
  FrameCheck check{manifest, root, keypoints ? &*keypoints : nullptr, report};
  // Variants of a pose share their ground-truth files; check each set once.
  std::set<std::string> seen;
  for (const ManifestFrame& f : manifest.frames) {
    check.image(f, f.image_rgb, 3);
    check.image(f, f.image_gray, 1);
    const std::string gt_key = f.depth + "|" + f.segmentation + "|" + f.dense_coords + "|" +
                               f.labels + "|" + f.heatmaps;
    if (seen.insert(gt_key).second) check.ground_truth(f);
    ++report.frames_checked;
  }
  if (report.reprojection_rate() < kRequiredReprojectionRate) {
    std::ostringstream msg;
    msg << "dense-coordinate reprojection rate " << report.reprojection_rate() << " is below "
        << kRequiredReprojectionRate;
    report.problems.push_back(msg.str());
  }
  return report;
}

}  // namespace satsynth
