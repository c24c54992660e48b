#pragma once

#include "satsynth/camera.hpp"
#include "satsynth/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace satsynth {

/// One generated frame. File paths are relative to the manifest directory;
/// absent outputs are empty strings.
struct ManifestFrame {
  std::string id;
  Pose pose;
  /// Index of the pose this frame renders; variants of a pose share it.
  std::uint64_t pose_index = 0;
  std::uint64_t variant = 0;
  std::string image_rgb;
  std::string image_gray;
  std::string depth;
  std::string segmentation;
  std::string dense_coords;
  std::string heatmaps;
  std::string labels;
};

struct DatasetManifest {
  std::string name;
  CameraModel camera{512, 512, 768, 768, 256, 256};
  std::string keypoints;
  double heatmap_sigma = 7.0;
  std::vector<ManifestFrame> frames;
};

/// Throws kParse on malformed content or duplicate frame ids.
DatasetManifest parse_manifest(const std::string& text);
DatasetManifest load_manifest(const std::filesystem::path& path);
std::string format_manifest(const DatasetManifest& manifest);
/// Atomic: written to a temporary name and renamed into place.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

/// Camera as a JSON object; shared by the manifest, run config and UI bundle.
std::string format_camera(const CameraModel& camera);

}  // namespace satsynth
