#include "satsynth/error.hpp"
#include "satsynth/pose_eval.hpp"

#include <cmath>

namespace satsynth {

std::vector<DecodedKeypoint> decode_heatmaps(const HeatmapTensor& tensor) {
  std::vector<DecodedKeypoint> out;
  out.reserve(tensor.channels());
  for (int c = 0; c < tensor.channels(); ++c) {
    int best_row = 0, best_col = 0;
    float best = tensor.at(0, 0, c);
    for (int row = 0; row < tensor.height(); ++row) {
      for (int col = 0; col < tensor.width(); ++col) {
        const float v = tensor.at(row, col, c);
        if (v > best) {
          best = v;
          best_row = row;
          best_col = col;
        }
      }
    }
    out.push_back({c, best_col + 0.5, best_row + 0.5, best});
  }
  return out;
}

std::vector<Keypoint2D> perturb_detections(const std::vector<Keypoint2D>& truth,
                                           double noise_sigma, double outlier_rate, int width,
                                           int height, Rng& rng) {
  if (!(noise_sigma >= 0.0) || !(outlier_rate >= 0.0 && outlier_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "detection noise sigma must be >= 0 and outlier rate in [0, 1]");
  }
  std::vector<Keypoint2D> out = truth;
  for (Keypoint2D& kp : out) {
    if (!std::isfinite(kp.u) || !std::isfinite(kp.v)) continue;
    // Draw count is fixed per keypoint so one outlier does not shift the
    // noise of the others.
    const double pick = rng.uniform();
    const double uu = rng.uniform(), uv = rng.uniform();
    const double nu = rng.normal(), nv = rng.normal();
    if (pick < outlier_rate) {
      kp.u = uu * width;
      kp.v = uv * height;
    } else {
      kp.u += noise_sigma * nu;
      kp.v += noise_sigma * nv;
    }
  }
  return out;
}

}  // namespace satsynth
