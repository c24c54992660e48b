#pragma once

#include "satsynth/image.hpp"
#include "satsynth/labels.hpp"
#include "satsynth/manifest.hpp"
#include "satsynth/mesh.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace satsynth {

// ---------------------------------------------------------------------------
// Wavefront OBJ subset: v, vn, f (polygons fanned into triangles), g/o/usemtl
// as material groups. Texture coordinates and other statements are ignored.

RawMesh parse_obj(const std::string& text);
/// Throws kIo "mesh not found: <path>" when the file is absent.
Mesh load_obj(const std::filesystem::path& path);

/// Indexed-triangle JSON used by the UI bundle.
std::string format_mesh_json(const Mesh& mesh);

// ---------------------------------------------------------------------------
// Keypoint file: {"origin": [x,y,z], "keypoints": [{"id", "name", "position"}]}

KeypointSet parse_keypoints(const std::string& text);
KeypointSet load_keypoints(const std::filesystem::path& path);
std::string format_keypoints(const KeypointSet& keypoints);

// ---------------------------------------------------------------------------
// Per-frame label file and ground-truth rasters

std::string format_labels(const std::string& frame, const Pose& pose,
                          const GroundTruthBundle& gt);

struct FrameLabels {
  std::string frame;
  Pose pose;
  std::vector<Keypoint2D> keypoints2d;
  std::optional<BoundingBox> bbox;
};
FrameLabels parse_labels(const std::string& text);

/// 1-channel float depth, +inf on background.
FloatImage depth_image(const GroundTruthBundle& gt);
/// 3-channel float model coordinates, NaN on background.
FloatImage dense_image(const GroundTruthBundle& gt);
/// 0 / 255 mask.
ByteImage segmentation_image(const GroundTruthBundle& gt);

// ---------------------------------------------------------------------------
// Dataset consistency check

struct CheckReport {
  std::vector<std::string> problems;
  std::size_t frames_checked = 0;
  std::size_t foreground_pixels = 0;
  std::size_t reprojected_within_tolerance = 0;

  double reprojection_rate() const {
    return foreground_pixels == 0 ? 1.0
                                  : static_cast<double>(reprojected_within_tolerance) /
                                        static_cast<double>(foreground_pixels);
  }
  bool ok() const { return problems.empty(); }
};

inline constexpr double kReprojectionTolerancePx = 0.5;
inline constexpr double kRequiredReprojectionRate = 0.999;

/// Verifies every frame of a dataset: files present and readable,
/// segmentation <=> finite depth <=> finite dense coordinates, dense
/// coordinates reprojecting into their pixel, and heatmap peaks at the
/// labeled keypoints. Problems are collected rather than thrown.
CheckReport check_dataset(const std::filesystem::path& manifest_path);

}  // namespace satsynth
