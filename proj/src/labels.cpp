#include "satsynth/labels.hpp"

#include "satsynth/error.hpp"

#include <cmath>
#include <sstream>

namespace satsynth {

KeypointSet::KeypointSet(Vec3 origin, std::vector<Keypoint> keypoints)
    : origin_(std::move(origin)), keypoints_(std::move(keypoints)) {
  if (!origin_.allFinite()) throw Error(ErrorCode::kInvalidArgument, "keypoint origin not finite");
  for (std::size_t i = 0; i < keypoints_.size(); ++i) {
    std::ostringstream msg;
    if (keypoints_[i].id != static_cast<int>(i)) {
      msg << "keypoint ids must be dense 0..C-1 in order; entry " << i << " has id "
          << keypoints_[i].id;
    } else if (!keypoints_[i].position.allFinite()) {
      msg << "keypoint " << i << " has a non-finite position";
    }
    if (!msg.str().empty()) throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

HeatmapTensor::HeatmapTensor(int width, int height, int channels)
    : HeatmapTensor(width, height, channels,
                    std::vector<float>(static_cast<std::size_t>(width > 0 ? width : 0) *
                                       (height > 0 ? height : 0) * (channels > 0 ? channels : 0))) {}

HeatmapTensor::HeatmapTensor(int width, int height, int channels, std::vector<float> values)
    : width_(width), height_(height), channels_(channels), values_(std::move(values)) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "heatmap dimensions must be positive");
  }
  if (values_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(ErrorCode::kInvalidArgument, "heatmap value count does not match its shape");
  }
  for (float v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "heatmap contains non-finite values");
  }
}

}  // namespace satsynth
