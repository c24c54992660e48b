#pragma once

#include "satsynth/augmentation.hpp"
#include "satsynth/pose_eval.hpp"
#include "satsynth/pose_sampling.hpp"
#include "satsynth/scene.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

namespace satsynth {

/// Everything a run needs. Paths are absolute once parsed (relative entries
/// are resolved against the config file's directory).
struct RunConfig {
  std::uint64_t seed = 42;
  std::string name = "dataset";
  SceneConfig scene;
  PoseSamplerConfig sampler;
  std::size_t frame_count = 10;
  double heatmap_sigma = 7.0;
  AugmentationPlan augmentation;
  RansacConfig ransac;

  std::filesystem::path mesh;
  std::filesystem::path keypoints;  ///< optional
  std::filesystem::path poses;      ///< optional; sampler used when empty
  std::filesystem::path output = "dataset";
};

/// Throws kConfig on unknown keys, wrong types or invalid values. Applies
/// `seed` to the sampler, augmentation and RANSAC streams.
RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Re-applies the top-level seed to every derived stream seed.
void set_seed(RunConfig& config, std::uint64_t seed);

}  // namespace satsynth
