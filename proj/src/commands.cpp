#include "satsynth/commands.hpp"

#include "json_util.hpp"
#include "satsynth/augmentation.hpp"
#include "satsynth/bvh.hpp"
#include "satsynth/error.hpp"
#include "satsynth/image_io.hpp"
#include "satsynth/parallel.hpp"
#include "satsynth/pipeline.hpp"

#include <cstdio>

namespace satsynth {

namespace fs = std::filesystem;
using detail::Json;

namespace {

std::string index_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", i);
  return buf;
}

std::string rel(const std::string& dir, const std::string& stem, const char* ext) {
  return dir + "/" + stem + ext;
}

struct RunInputs {
  Mesh mesh;
  KeypointSet keypoints;
  std::string keypoint_text;
  std::vector<FramePose> poses;
};

RunInputs load_inputs(const RunConfig& cfg) {
  RunInputs in;
  in.mesh = load_obj(cfg.mesh);
  if (!cfg.keypoints.empty()) {
    if (!fs::is_regular_file(cfg.keypoints)) {
      throw Error(ErrorCode::kIo, "keypoint file not found: " + cfg.keypoints.string());
    }
    in.keypoint_text = detail::read_text_file(cfg.keypoints);
    in.keypoints = parse_keypoints(in.keypoint_text);
    // Keypoint coordinates are relative to the labeled origin; render in that frame.
    if (!in.keypoints.origin().isZero(0.0)) in.mesh = in.mesh.translated(-in.keypoints.origin());
  }
  in.poses = cfg.poses.empty() ? sample_run_poses(cfg) : load_poses(cfg.poses);
  return in;
}

void write_ground_truth(const fs::path& root, const std::string& stem, const std::string& frame,
                        const Pose& pose, const OutputFlags& flags, const GroundTruthBundle& gt,
                        const std::optional<HeatmapTensor>& heatmaps, ManifestFrame& entry) {
  if (flags.depth) {
    entry.depth = rel("depth", stem, ".pfm");
    write_pfm(root / entry.depth, depth_image(gt));
  }
  if (flags.segmentation) {
    entry.segmentation = rel("segmentation", stem, ".png");
    write_png(root / entry.segmentation, segmentation_image(gt));
  }
  if (flags.dense_coords) {
    entry.dense_coords = rel("dense", stem, ".pfm");
    write_pfm(root / entry.dense_coords, dense_image(gt));
  }
  if (heatmaps) {
    entry.heatmaps = rel("heatmaps", stem, ".spnh");
    write_heatmaps(root / entry.heatmaps, *heatmaps);
  }
  entry.labels = rel("labels", stem, ".json");
  detail::write_text_file_atomic(root / entry.labels, format_labels(frame, pose, gt));
}

DatasetManifest run_dataset(const RunConfig& cfg, int k, bool augment, int workers) {
  if (k < 1) throw Error(ErrorCode::kConfig, "augmentation k must be >= 1");
  validate(cfg.scene);
  const fs::path root = cfg.output;
  fs::create_directories(root);
  const fs::path manifest_path = root / "manifest.json";
  fs::remove(manifest_path);

  const RunInputs in = load_inputs(cfg);
  const Bvh bvh = build_bvh(in.mesh);
  for (const char* dir : {"images", "depth", "segmentation", "dense", "heatmaps", "labels"}) {
    fs::create_directories(root / dir);
  }
  AugmentationPlan plan = cfg.augmentation;
  plan.k = k;

  const std::size_t n = in.poses.size();
  std::vector<std::vector<ManifestFrame>> per_pose(n);
  const RenderOptions options{1, false};
  parallel_for(n, workers > 0 ? workers : default_worker_count(), [&](std::size_t i) {
    const FramePose& fp = in.poses[i];
    const std::string stem = index_stem(i);
    const FrameKey key{cfg.seed, i, 0};
    GroundTruthBundle gt;
    std::optional<HeatmapTensor> heatmaps;
    std::vector<FrameImages> images;
    std::vector<SceneConfig> variants;
    try {
      if (augment) {
        variants = make_variants(cfg.scene, plan, i);
        AugmentedFrame af = render_augmented(in.mesh, bvh, in.keypoints, fp.pose, variants, key,
                                             cfg.heatmap_sigma, options);
        gt = std::move(af.ground_truth);
        heatmaps = std::move(af.heatmaps);
        images = std::move(af.images);
      } else {
        LabeledFrame lf = render_labeled_frame(in.mesh, bvh, in.keypoints, fp.pose, cfg.scene, key,
                                               cfg.heatmap_sigma, options);
        gt = std::move(lf.ground_truth);
        heatmaps = std::move(lf.heatmaps);
        images.push_back(std::move(lf.images));
      }
    } catch (const Error& e) {
      throw Error(e.code(), "frame " + fp.frame + ": " + e.what());
    }

    ManifestFrame shared;
    shared.pose = fp.pose;
    shared.pose_index = i;
    write_ground_truth(root, stem, fp.frame, fp.pose, cfg.scene.outputs, gt, heatmaps, shared);
    for (std::size_t v = 0; v < images.size(); ++v) {
      ManifestFrame f = shared;
      f.variant = v;
      const std::string suffix = k > 1 ? "_v" + std::to_string(v) : "";
      f.id = fp.frame + suffix;
      if (images[v].rgb) {
        f.image_rgb = rel("images", stem + suffix, ".png");
        write_png(root / f.image_rgb, *images[v].rgb);
      }
      if (images[v].gray) {
        f.image_gray = rel("images", stem + suffix, "_gray.png");
        write_png(root / f.image_gray, *images[v].gray);
      }
      per_pose[i].push_back(std::move(f));
    }
  });

  DatasetManifest manifest;
  manifest.name = cfg.name;
  manifest.camera = cfg.scene.camera;
  manifest.heatmap_sigma = cfg.heatmap_sigma;
  if (!in.keypoint_text.empty()) {
    manifest.keypoints = "keypoints.json";
    detail::write_text_file_atomic(root / manifest.keypoints, in.keypoint_text);
  }
  for (auto& frames : per_pose) {
    for (ManifestFrame& f : frames) manifest.frames.push_back(std::move(f));
  }
  // Re-parse to reject duplicate ids before anything is published.
  const std::string text = format_manifest(manifest);
  parse_manifest(text);
  detail::write_text_file_atomic(manifest_path, text);
  return manifest;
}

}  // namespace

std::vector<FramePose> sample_run_poses(const RunConfig& cfg) {
  std::vector<FramePose> poses;
  poses.reserve(cfg.frame_count);
  for (std::size_t i = 0; i < cfg.frame_count; ++i) {
    poses.push_back({index_stem(i), sample_pose_for_frame(cfg.sampler, cfg.scene.camera, i)});
  }
  return poses;
}

DatasetManifest cmd_generate(const RunConfig& config, int workers) {
  return run_dataset(config, 1, false, workers);
}

DatasetManifest cmd_augment(const RunConfig& config, int k, int workers) {
  return run_dataset(config, k, true, workers);
}

CheckReport cmd_check(const fs::path& manifest_path) { return check_dataset(manifest_path); }

EvaluationReport cmd_eval(const fs::path& manifest_path, const EvalInput& input,
                          const RansacConfig& ransac, int workers,
                          std::vector<FramePose>* recovered) {
  validate(ransac);
  const DatasetManifest manifest = load_manifest(manifest_path);
  const fs::path root = manifest_path.parent_path();
  const int modes = !input.estimates.empty() + !input.heatmap_dir.empty() + input.dataset_heatmaps;
  if (modes != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "eval needs exactly one of: estimates file, heatmap directory, dataset heatmaps");
  }
  std::vector<FramePose> estimates;
  if (!input.estimates.empty()) {
    estimates = load_poses(input.estimates);
  } else {
    if (manifest.keypoints.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "dataset has no keypoint file to match heatmaps");
    }
    const KeypointSet keypoints = load_keypoints(root / manifest.keypoints);
    const std::size_t n = manifest.frames.size();
    std::vector<fs::path> paths(n);
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < n; ++i) {
      const ManifestFrame& f = manifest.frames[i];
      if (input.dataset_heatmaps) {
        if (!f.heatmaps.empty()) paths[i] = root / f.heatmaps;
      } else {
        paths[i] = input.heatmap_dir / (f.id + ".spnh");
      }
      if (paths[i].empty() || !fs::is_regular_file(paths[i])) missing.push_back(f.id);
    }
    if (!missing.empty()) {
      std::string ids;
      for (const std::string& id : missing) ids += (ids.empty() ? "" : ", ") + id;
      throw Error(ErrorCode::kMissingFrames, "no heatmaps for frames: " + ids);
    }
    estimates.resize(n);
    parallel_for(n, workers > 0 ? workers : default_worker_count(), [&](std::size_t i) {
      const ManifestFrame& f = manifest.frames[i];
      try {
        const HeatmapTensor tensor = read_heatmaps(paths[i]);
        if (tensor.width() != manifest.camera.width() ||
            tensor.height() != manifest.camera.height() ||
            static_cast<std::size_t>(tensor.channels()) != keypoints.size()) {
          throw Error(ErrorCode::kInvalidArgument, "heatmap tensor shape does not match the dataset");
        }
        std::vector<Correspondence> corr;
        for (const DecodedKeypoint& d : decode_heatmaps(tensor)) {
          if (d.score <= 0.0f) continue;
          corr.push_back({d.id, Vec2(d.u, d.v), keypoints.keypoints()[d.id].position});
        }
        RansacConfig cfg = ransac;
        cfg.seed = mix64(ransac.seed ^ mix64(i));
        estimates[i] = {f.id, ransac_pnp(corr, manifest.camera, cfg).pose};
      } catch (const Error& e) {
        throw Error(e.code(), "frame " + f.id + ": " + e.what());
      }
    });
  }
  if (recovered) *recovered = estimates;
  return evaluate_dataset(manifest, estimates);
}

void cmd_export_ui(const fs::path& mesh_path, const std::optional<fs::path>& keypoints_path,
                   const std::optional<UiSample>& sample, const fs::path& out_dir) {
  const Mesh mesh = load_obj(mesh_path);
  fs::create_directories(out_dir);
  detail::write_text_file_atomic(out_dir / "mesh.json", format_mesh_json(mesh));
  if (keypoints_path) {
    const std::string text = detail::read_text_file(*keypoints_path);
    parse_keypoints(text);
    detail::write_text_file_atomic(out_dir / "keypoints.json", text);
  }
  if (sample) {
    const DatasetManifest manifest = load_manifest(sample->manifest);
    const ManifestFrame* frame = nullptr;
    for (const ManifestFrame& f : manifest.frames) {
      if (f.id == sample->frame) frame = &f;
    }
    if (!frame) throw Error(ErrorCode::kInvalidArgument, "no frame " + sample->frame + " in manifest");
    const std::string image = !frame->image_rgb.empty() ? frame->image_rgb : frame->image_gray;
    if (image.empty()) throw Error(ErrorCode::kInvalidArgument, "frame has no image to export");
    fs::create_directories(out_dir / "sample");
    fs::copy_file(sample->manifest.parent_path() / image, out_dir / "sample" / "image.png",
                  fs::copy_options::overwrite_existing);
    Json doc{{"frame", frame->id},
             {"image", "image.png"},
             {"pose", detail::pose_to_json(frame->pose)},
             {"camera", detail::camera_to_json(manifest.camera)}};
    detail::write_text_file_atomic(out_dir / "sample" / "frame.json", detail::dump(doc));
  }
}

}  // namespace satsynth
