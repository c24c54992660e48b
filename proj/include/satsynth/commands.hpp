#pragma once

#include "satsynth/config.hpp"
#include "satsynth/dataset_io.hpp"
#include "satsynth/manifest.hpp"
#include "satsynth/pose_eval.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace satsynth {

/// Renders every pose of the run and writes the dataset under
/// `config.output`. The manifest is written last, atomically; any earlier
/// manifest is removed first so a failed run leaves none behind.
DatasetManifest cmd_generate(const RunConfig& config, int workers);

/// As cmd_generate with `k` appearance variants per pose drawn from the
/// config's augmentation plan. Throws kConfig when k < 1.
DatasetManifest cmd_augment(const RunConfig& config, int k, int workers);

CheckReport cmd_check(const std::filesystem::path& manifest_path);

struct EvalInput {
  /// Pose-list file of estimates.
  std::filesystem::path estimates;
  /// Directory of `<frame id>.spnh` heatmap tensors to decode.
  std::filesystem::path heatmap_dir;
  /// Decode the dataset's own ground-truth heatmaps instead.
  bool dataset_heatmaps = false;
};

/// Scores a dataset against pose estimates, or against poses recovered from
/// heatmaps by decode + RANSAC-EPnP (one derived stream per frame).
/// Recovered poses are returned through `recovered` when non-null.
EvaluationReport cmd_eval(const std::filesystem::path& manifest_path, const EvalInput& input,
                          const RansacConfig& ransac, int workers,
                          std::vector<FramePose>* recovered = nullptr);

/// Samples `config.frame_count` poses; ids are zero-padded indices.
std::vector<FramePose> sample_run_poses(const RunConfig& config);

/// Writes `mesh.json`, optionally `keypoints.json` (byte copy of the input)
/// and `sample/{image.png, frame.json}` for one frame of a dataset.
struct UiSample {
  std::filesystem::path manifest;
  std::string frame;
};
void cmd_export_ui(const std::filesystem::path& mesh_path,
                   const std::optional<std::filesystem::path>& keypoints_path,
                   const std::optional<UiSample>& sample, const std::filesystem::path& out_dir);

}  // namespace satsynth
