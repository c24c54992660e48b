#pragma once

#include "satsynth/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace satsynth {

struct Keypoint {
  int id = 0;
  std::string name;
  Vec3 position = Vec3::Zero();
  bool operator==(const Keypoint&) const = default;
};

/// Ordered 3D keypoints in the model frame. `origin` is the point the model
/// frame was anchored to when the set was labeled.
class KeypointSet {
 public:
  KeypointSet() = default;
  /// Throws kInvalidArgument unless ids are 0..C-1 in order and finite.
  KeypointSet(Vec3 origin, std::vector<Keypoint> keypoints);

  const Vec3& origin() const { return origin_; }
  const std::vector<Keypoint>& keypoints() const { return keypoints_; }
  std::size_t size() const { return keypoints_.size(); }

  bool operator==(const KeypointSet&) const = default;

 private:
  Vec3 origin_ = Vec3::Zero();
  std::vector<Keypoint> keypoints_;
};

/// Row-major height x width x channels tensor of float32 values.
class HeatmapTensor {
 public:
  HeatmapTensor() = default;
  HeatmapTensor(int width, int height, int channels);
  HeatmapTensor(int width, int height, int channels, std::vector<float> values);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  std::size_t index(int row, int col, int channel) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + channel;
  }
  float at(int row, int col, int channel) const { return values_[index(row, col, channel)]; }
  float& at(int row, int col, int channel) { return values_[index(row, col, channel)]; }

  const std::vector<float>& values() const { return values_; }
  std::vector<float>& values() { return values_; }

  bool same_shape(const HeatmapTensor& rhs) const {
    return width_ == rhs.width_ && height_ == rhs.height_ && channels_ == rhs.channels_;
  }
  bool operator==(const HeatmapTensor&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> values_;
};

struct Keypoint2D {
  int id = 0;
  double u = 0.0;
  double v = 0.0;
  bool visible = false;
  bool operator==(const Keypoint2D&) const = default;
};

/// Pixel-edge bounds: the box covers columns [umin, umax) and rows [vmin, vmax).
struct BoundingBox {
  int umin = 0;
  int vmin = 0;
  int umax = 0;
  int vmax = 0;
  bool operator==(const BoundingBox&) const = default;
};

/// Per-frame labels. Background pixels carry depth +inf, segmentation 0,
/// and NaN dense coordinates.
struct GroundTruthBundle {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<std::uint8_t> segmentation;
  /// width * height * 3, model frame.
  std::vector<double> dense_coords;
  std::vector<Keypoint2D> keypoints2d;
  std::optional<BoundingBox> bbox;
};

}  // namespace satsynth
