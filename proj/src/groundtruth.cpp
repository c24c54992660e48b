#include "satsynth/groundtruth.hpp"

#include "satsynth/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace satsynth {

Projection project_point(const CameraModel& camera, const Pose& pose, const Vec3& model_point) {
  const Vec3 x = pose.transform(model_point);
  if (!(x.z() > 1e-9)) {
    std::ostringstream msg;
    msg << "point at or behind the camera plane (z = " << x.z() << ")";
    throw Error(ErrorCode::kBehindCamera, msg.str());
  }
  const Vec2 pixel = camera.normalized_to_pixel(Vec2(x.x() / x.z(), x.y() / x.z()));
  return {pixel.x(), pixel.y(), x.z()};
}

namespace {

// Depth under a keypoint's pixel. Keypoints on the silhouette can land on a
// background pixel; those use the deepest surface among the 8 neighbours.
// +inf when there is no surface nearby.
double surface_depth_near(const FrameBuffers& fb, int row, int col) {
  const double own = fb.depth[static_cast<std::size_t>(row) * fb.width + col];
  if (std::isfinite(own)) return own;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = std::max(0, row - 1); r <= std::min(fb.height - 1, row + 1); ++r) {
    for (int c = std::max(0, col - 1); c <= std::min(fb.width - 1, col + 1); ++c) {
      const double d = fb.depth[static_cast<std::size_t>(r) * fb.width + c];
      if (std::isfinite(d)) best = std::max(best, d);
    }
  }
  return std::isfinite(best) ? best : std::numeric_limits<double>::infinity();
}

}  // namespace

GroundTruthBundle extract_labels(const FrameBuffers& fb, const Pose& pose,
                                 const CameraModel& camera, const KeypointSet& keypoints) {
  GroundTruthBundle gt;
  gt.width = fb.width;
  gt.height = fb.height;
  gt.depth = fb.depth;
  gt.dense_coords = fb.hit_point_model;
  const std::size_t pixels = static_cast<std::size_t>(fb.width) * fb.height;
  gt.segmentation.assign(pixels, 0);

  int umin = fb.width, vmin = fb.height, umax = -1, vmax = -1;
  for (int row = 0; row < fb.height; ++row) {
    for (int col = 0; col < fb.width; ++col) {
      const std::size_t p = static_cast<std::size_t>(row) * fb.width + col;
      if (fb.hit_triangle[p] < 0) continue;
      gt.segmentation[p] = 1;
      umin = std::min(umin, col);
      umax = std::max(umax, col);
      vmin = std::min(vmin, row);
      vmax = std::max(vmax, row);
    }
  }
  if (umax >= 0) gt.bbox = BoundingBox{umin, vmin, umax + 1, vmax + 1};

  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  gt.keypoints2d.reserve(keypoints.size());
  for (const Keypoint& kp : keypoints.keypoints()) {
    Keypoint2D out{kp.id, kNaN, kNaN, false};
    const Vec3 cam = pose.transform(kp.position);
    if (cam.z() > 1e-9) {
      const Projection proj = project_point(camera, pose, kp.position);
      out.u = proj.u;
      out.v = proj.v;
      if (camera.in_bounds(proj.u, proj.v)) {
        const int col = static_cast<int>(proj.u), row = static_cast<int>(proj.v);
        const double surface = surface_depth_near(fb, row, col);
        out.visible = std::isfinite(surface) && surface >= proj.z - kKeypointOcclusionSlack;
      }
    }
    gt.keypoints2d.push_back(out);
  }
  return gt;
}

HeatmapTensor make_heatmaps(const std::vector<Keypoint2D>& keypoints, int width, int height,
                            double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "heatmap sigma must be > 0");
  if (keypoints.empty()) throw Error(ErrorCode::kInvalidArgument, "heatmaps need >= 1 keypoint");
  const int channels = static_cast<int>(keypoints.size());
  HeatmapTensor tensor(width, height, channels);
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> gx(width), gy(height);
  for (int c = 0; c < channels; ++c) {
    const Keypoint2D& kp = keypoints[c];
    if (!std::isfinite(kp.u) || !std::isfinite(kp.v)) continue;
    // exp(-(dx^2 + dy^2) / 2s^2) factors into a row term and a column term.
    for (int col = 0; col < width; ++col) {
      const double d = col + 0.5 - kp.u;
      gx[col] = std::exp(-d * d * inv_two_sigma2);
    }
    for (int row = 0; row < height; ++row) {
      const double d = row + 0.5 - kp.v;
      gy[row] = std::exp(-d * d * inv_two_sigma2);
    }
    for (int row = 0; row < height; ++row) {
      if (gy[row] == 0.0) continue;
      for (int col = 0; col < width; ++col) {
        tensor.at(row, col, c) = static_cast<float>(gy[row] * gx[col]);
      }
    }
  }
  return tensor;
}

double heatmap_mse(const HeatmapTensor& predicted, const HeatmapTensor& target) {
  if (!predicted.same_shape(target)) {
    throw Error(ErrorCode::kInvalidArgument, "heatmap_mse: tensor shapes differ");
  }
  const auto& a = predicted.values();
  const auto& b = target.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

}  // namespace satsynth
