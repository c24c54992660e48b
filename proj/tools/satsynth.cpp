// Command-line front end: generate, augment, check, eval, sample-poses, export-ui.

#include "satsynth/commands.hpp"
#include "satsynth/error.hpp"
#include "satsynth/parallel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace satsynth;

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string poses;
  int workers = 0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("config", f.config, "Run configuration (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--out", f.out, "Override the output directory");
  cmd->add_option("--poses", f.poses, "Render poses from this file instead of sampling");
  cmd->add_option("--workers", f.workers,
                  "Worker threads (default: $SATSYNTH_WORKERS or hardware concurrency)");
}

RunConfig load_with_overrides(const RunFlags& f) {
  RunConfig cfg = load_run_config(f.config);
  if (f.seed) set_seed(cfg, *f.seed);
  if (!f.out.empty()) cfg.output = fs::absolute(f.out);
  if (!f.poses.empty()) cfg.poses = fs::absolute(f.poses);
  return cfg;
}

int workers_or_default(int w) { return w > 0 ? w : default_worker_count(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic spacecraft imagery and pose evaluation"};
  app.require_subcommand(1);

  RunFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "Render a dataset");
  add_run_flags(gen, gen_flags);

  RunFlags aug_flags;
  std::optional<int> aug_k;
  auto* aug = app.add_subcommand("augment", "Render K appearance variants per pose");
  add_run_flags(aug, aug_flags);
  aug->add_option("--k", aug_k, "Variants per pose (overrides augmentation.k)");

  std::string check_manifest;
  auto* check = app.add_subcommand("check", "Verify a generated dataset");
  check->add_option("manifest", check_manifest, "Dataset manifest")->required();

  std::string eval_manifest, eval_estimates, eval_heatmaps, eval_config, eval_report, eval_poses_out;
  bool eval_gt_heatmaps = false;
  std::optional<double> eval_threshold, eval_confidence;
  std::optional<int> eval_iterations;
  std::optional<std::uint64_t> eval_seed;
  int eval_workers = 0;
  auto* eval = app.add_subcommand("eval", "Score pose estimates against a dataset");
  eval->add_option("manifest", eval_manifest, "Dataset manifest")->required();
  auto* est_opt = eval->add_option("--estimates", eval_estimates, "Pose-list file of estimates");
  auto* heat_opt = eval->add_option("--heatmaps", eval_heatmaps,
                                    "Directory of <frame id>.spnh tensors to decode");
  auto* gt_opt = eval->add_flag("--dataset-heatmaps", eval_gt_heatmaps,
                                "Decode the dataset's own heatmaps");
  est_opt->excludes(heat_opt)->excludes(gt_opt);
  heat_opt->excludes(gt_opt);
  eval->add_option("--config", eval_config, "Take RANSAC settings and seed from a run config");
  eval->add_option("--threshold", eval_threshold, "RANSAC inlier threshold (px)");
  eval->add_option("--iterations", eval_iterations, "RANSAC iteration cap");
  eval->add_option("--confidence", eval_confidence, "RANSAC confidence");
  eval->add_option("--seed", eval_seed, "RANSAC seed");
  eval->add_option("--report", eval_report, "Write the CSV report here instead of stdout");
  eval->add_option("--poses-out", eval_poses_out, "Write recovered poses here");
  eval->add_option("--workers", eval_workers, "Worker threads");

  std::string sp_config, sp_out;
  std::optional<std::size_t> sp_count;
  std::optional<std::uint64_t> sp_seed;
  auto* sp = app.add_subcommand("sample-poses", "Write sampled poses to a pose file");
  sp->add_option("config", sp_config, "Run configuration (JSON)")->required();
  sp->add_option("--out", sp_out, "Pose file to write")->required();
  sp->add_option("--count", sp_count, "Number of poses (overrides sampler.count)");
  sp->add_option("--seed", sp_seed, "Override the config seed");

  std::string ui_mesh, ui_out, ui_keypoints, ui_manifest, ui_frame;
  auto* ui = app.add_subcommand("export-ui", "Write the labeling UI bundle");
  ui->add_option("mesh", ui_mesh, "OBJ mesh")->required();
  ui->add_option("--out", ui_out, "Bundle directory")->required();
  ui->add_option("--keypoints", ui_keypoints, "Existing keypoint file to include");
  auto* ui_m = ui->add_option("--sample-manifest", ui_manifest, "Dataset holding the sample frame");
  auto* ui_f = ui->add_option("--frame", ui_frame, "Sample frame id");
  ui_m->needs(ui_f);
  ui_f->needs(ui_m);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const RunConfig cfg = load_with_overrides(gen_flags);
      const DatasetManifest m = cmd_generate(cfg, workers_or_default(gen_flags.workers));
      std::cout << "wrote " << m.frames.size() << " frames to " << cfg.output.string() << "\n";
    } else if (aug->parsed()) {
      const RunConfig cfg = load_with_overrides(aug_flags);
      const int k = aug_k.value_or(cfg.augmentation.k);
      const DatasetManifest m = cmd_augment(cfg, k, workers_or_default(aug_flags.workers));
      std::cout << "wrote " << m.frames.size() << " frames to " << cfg.output.string() << "\n";
    } else if (check->parsed()) {
      const CheckReport r = cmd_check(check_manifest);
      for (const std::string& p : r.problems) std::cout << "FAIL " << p << "\n";
      std::cout << "frames checked: " << r.frames_checked << "\n"
                << "foreground pixels: " << r.foreground_pixels << "\n"
                << "reprojected within " << kReprojectionTolerancePx
                << " px: " << r.reprojected_within_tolerance << " (" << 100.0 * r.reprojection_rate()
                << "%)\n"
                << (r.ok() ? "PASS" : "FAIL") << "\n";
      return r.ok() ? 0 : 1;
    } else if (eval->parsed()) {
      RansacConfig ransac;
      if (!eval_config.empty()) ransac = load_run_config(eval_config).ransac;
      if (eval_threshold) ransac.inlier_threshold_px = *eval_threshold;
      if (eval_iterations) ransac.max_iterations = *eval_iterations;
      if (eval_confidence) ransac.confidence = *eval_confidence;
      if (eval_seed) ransac.seed = *eval_seed;
      EvalInput input;
      input.estimates = eval_estimates;
      input.heatmap_dir = eval_heatmaps;
      input.dataset_heatmaps = eval_gt_heatmaps;
      std::vector<FramePose> recovered;
      const EvaluationReport report =
          cmd_eval(eval_manifest, input, ransac, workers_or_default(eval_workers), &recovered);
      if (eval_report.empty()) {
        std::cout << report.to_csv();
      } else {
        std::ofstream(eval_report) << report.to_csv();
        std::cout << "mean S_v " << report.mean_s_v << ", mean S_q " << report.mean_s_q
                  << ", mean S " << report.mean_s << "\n";
      }
      if (!eval_poses_out.empty()) save_poses(recovered, eval_poses_out);
    } else if (sp->parsed()) {
      RunConfig cfg = load_run_config(sp_config);
      if (sp_seed) set_seed(cfg, *sp_seed);
      if (sp_count) cfg.frame_count = *sp_count;
      save_poses(sample_run_poses(cfg), sp_out);
    } else if (ui->parsed()) {
      std::optional<fs::path> kp;
      if (!ui_keypoints.empty()) kp = fs::path(ui_keypoints);
      std::optional<UiSample> sample;
      if (!ui_manifest.empty()) sample = UiSample{ui_manifest, ui_frame};
      cmd_export_ui(ui_mesh, kp, sample, ui_out);
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
