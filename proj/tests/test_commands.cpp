#include "satsynth/commands.hpp"
#include "satsynth/image_io.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <map>
#include <set>

using namespace satsynth;
using satsynth::test::error_message;
using satsynth::test::read_file;
using satsynth::test::TempDir;
using satsynth::test::write_file;
namespace fs = std::filesystem;

namespace {

const fs::path kAssets = fs::path(SATSYNTH_SOURCE_DIR) / "assets";

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string cube_keypoints() {
  std::vector<Keypoint> kps;
  int id = 0;
  for (double x : {-0.5, 0.5})
    for (double y : {-0.5, 0.5})
      for (double z : {-0.5, 0.5}) kps.push_back({id, "corner" + std::to_string(id), {x, y, z}}), ++id;
  return format_keypoints(KeypointSet(Vec3::Zero(), kps));
}

// Small cube scene; `extra` is spliced into the top-level object.
RunConfig cube_config(const TempDir& dir, int count, const std::string& extra = "") {
  write_file(dir / "kp.json", cube_keypoints());
  const std::string text = R"({
    "seed": 5,
    "camera": {"width": 64, "height": 64, "fx": 96, "fy": 96, "cx": 32, "cy": 31.5,
               "distortion": {"k1": -0.02, "p1": 0.0005}},
    "effects": {"noise": {"enabled": true, "gaussian_sigma": 0.01}},
    "outputs": {"gray": true, "heatmap_sigma": 2},
    "sampler": {"count": )" + std::to_string(count) +
                           R"(, "z_min": 4, "z_max": 7, "lateral_margin": 0.3},
    "augmentation": {"light_cone_half_angle": 0.5},
    "paths": {"mesh": ")" + (kAssets / "cube.obj").string() +
                           R"(", "keypoints": "kp.json", "output": "out"})" + extra + "}";
  return parse_run_config(text, dir.path());
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return files;
}

int count_files(const fs::path& dir) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
  return n;
}

std::string joined(const std::vector<std::string>& problems) {
  std::string s;
  for (const auto& p : problems) s += p + "\n";
  return s;
}

}  // namespace

TEST(Generate, WritesEveryOutputAndPassesCheck) {
  TempDir dir("gen");
  const RunConfig cfg = cube_config(dir, 10);
  const DatasetManifest m = cmd_generate(cfg, 2);
  ASSERT_EQ(m.frames.size(), 10u);
  const fs::path out = cfg.output;
  EXPECT_EQ(count_files(out / "images"), 20);  // rgb + gray
  for (const char* sub : {"depth", "segmentation", "dense", "heatmaps", "labels"}) {
    EXPECT_EQ(count_files(out / sub), 10) << sub;
  }
  EXPECT_EQ(read_file(out / "keypoints.json"), read_file(dir / "kp.json"));
  EXPECT_EQ(m.frames[3].id, "000003");
  EXPECT_EQ(m.frames[3].depth, "depth/000003.pfm");
  EXPECT_EQ(m.frames[3].image_gray, "images/000003_gray.png");
  const DatasetManifest loaded = load_manifest(out / "manifest.json");
  EXPECT_EQ(loaded.frames.size(), 10u);
  EXPECT_EQ(loaded.camera, cfg.scene.camera);
  EXPECT_EQ(read_png(out / m.frames[0].image_gray).channels, 1);

  const CheckReport report = cmd_check(out / "manifest.json");
  EXPECT_TRUE(report.ok()) << joined(report.problems);
  EXPECT_EQ(report.frames_checked, 10u);
  EXPECT_GT(report.foreground_pixels, 1000u);
  EXPECT_GE(report.reprojection_rate(), kRequiredReprojectionRate);
}

TEST(Generate, PoseFileInputKeepsIds) {
  TempDir dir("gen_poses");
  std::vector<FramePose> poses;
  for (const char* id : {"alpha", "beta"}) {
    Pose p;
    p.rotation = Quaternion::normalized(0.2, id[0] == 'a' ? 0.1 : -0.3, 0, 1);
    p.translation = {0.1, 0, 5};
    poses.push_back({id, p});
  }
  save_poses(poses, dir / "poses.txt");
  RunConfig cfg = cube_config(dir, 10);
  cfg.poses = dir / "poses.txt";
  const DatasetManifest m = cmd_generate(cfg, 1);
  ASSERT_EQ(m.frames.size(), 2u);
  EXPECT_EQ(m.frames[0].id, "alpha");
  EXPECT_EQ(m.frames[1].id, "beta");
  EXPECT_EQ(m.frames[1].pose, poses[1].pose);
  EXPECT_TRUE(cmd_check(cfg.output / "manifest.json").ok());
}

TEST(Generate, RerunAndWorkerCountAreByteIdentical) {
  TempDir dir("gen_det");
  RunConfig cfg = cube_config(dir, 6);
  cmd_generate(cfg, 1);
  const auto first = tree(cfg.output);
  cmd_generate(cfg, 3);
  EXPECT_TRUE(first == tree(cfg.output));
  cfg.output = dir / "other";
  cmd_generate(cfg, 4);
  EXPECT_TRUE(first == tree(cfg.output));
  set_seed(cfg, 6);
  cfg.output = dir / "reseeded";
  cmd_generate(cfg, 1);
  EXPECT_FALSE(first == tree(cfg.output));
}

TEST(Generate, FailedRunLeavesNoManifest) {
  TempDir dir("gen_fail");
  RunConfig cfg = cube_config(dir, 2);
  cmd_generate(cfg, 1);
  ASSERT_TRUE(fs::exists(cfg.output / "manifest.json"));
  cfg.mesh = dir / "missing.obj";
  const std::string msg = error_message([&] { cmd_generate(cfg, 1); });
  EXPECT_TRUE(contains(msg, "mesh not found")) << msg;
  EXPECT_FALSE(fs::exists(cfg.output / "manifest.json"));
}

TEST(Generate, DisabledOutputsAreNotWritten) {
  TempDir dir("gen_off");
  const RunConfig cfg = cube_config(
      dir, 2, R"(, "lights": {"shadows": false})" );
  RunConfig off = cfg;
  off.scene.outputs.dense_coords = false;
  off.scene.outputs.heatmaps = false;
  off.scene.outputs.gray = false;
  const DatasetManifest m = cmd_generate(off, 1);
  EXPECT_TRUE(m.frames[0].dense_coords.empty());
  EXPECT_TRUE(m.frames[0].heatmaps.empty());
  EXPECT_TRUE(m.frames[0].image_gray.empty());
  EXPECT_EQ(count_files(off.output / "dense"), 0);
  EXPECT_TRUE(cmd_check(off.output / "manifest.json").ok());
}

TEST(Check, ReportsTruncatedFile) {
  TempDir dir("check_trunc");
  const RunConfig cfg = cube_config(dir, 5);
  cmd_generate(cfg, 1);
  const fs::path depth = cfg.output / "depth" / "000003.pfm";
  const std::string bytes = read_file(depth);
  write_file(depth, bytes.substr(0, bytes.size() / 2));
  const CheckReport r = cmd_check(cfg.output / "manifest.json");
  EXPECT_FALSE(r.ok());
  const std::string all = joined(r.problems);
  EXPECT_TRUE(contains(all, "depth/000003.pfm")) << all;
  EXPECT_TRUE(contains(all, "000003")) << all;
  EXPECT_FALSE(contains(all, "000002")) << all;
}

TEST(Check, ReportsDanglingFrame) {
  TempDir dir("check_dangling");
  const RunConfig cfg = cube_config(dir, 3);
  DatasetManifest m = cmd_generate(cfg, 1);
  ManifestFrame ghost = m.frames[0];
  ghost.id = "ghost";
  ghost.image_rgb = "images/ghost.png";
  ghost.depth = "depth/ghost.pfm";
  m.frames.push_back(ghost);
  save_manifest(m, cfg.output / "manifest.json");
  const CheckReport r = cmd_check(cfg.output / "manifest.json");
  EXPECT_FALSE(r.ok());
  const std::string all = joined(r.problems);
  EXPECT_TRUE(contains(all, "ghost")) << all;
  EXPECT_TRUE(contains(all, "missing file")) << all;
}

TEST(Check, ReportsSegmentationDepthMismatch) {
  TempDir dir("check_seg");
  const RunConfig cfg = cube_config(dir, 2);
  const DatasetManifest m = cmd_generate(cfg, 1);
  ByteImage seg = read_png(cfg.output / m.frames[1].segmentation);
  seg.data[0] = 255;  // corner pixel is background in depth
  write_png(cfg.output / m.frames[1].segmentation, seg);
  const CheckReport r = cmd_check(cfg.output / "manifest.json");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(contains(joined(r.problems), "000001")) << joined(r.problems);
}

TEST(Check, ReportsTamperedLabels) {
  TempDir dir("check_labels");
  const RunConfig cfg = cube_config(dir, 2);
  const DatasetManifest m = cmd_generate(cfg, 1);
  const fs::path path = cfg.output / m.frames[0].labels;
  auto doc = nlohmann::json::parse(read_file(path));
  doc["keypoints"][0]["u"] = doc["keypoints"][0]["u"].get<double>() + 3.0;
  write_file(path, doc.dump(2));
  const CheckReport r = cmd_check(cfg.output / "manifest.json");
  EXPECT_FALSE(r.ok());
  EXPECT_TRUE(contains(joined(r.problems), "keypoint 0")) << joined(r.problems);
}

TEST(Check, MissingManifestIsAProblem) {
  const CheckReport r = cmd_check("/nonexistent/manifest.json");
  EXPECT_FALSE(r.ok());
}

TEST(Augment, RejectsNonPositiveK) {
  TempDir dir("aug_k0");
  EXPECT_ERROR_CODE(cmd_augment(cube_config(dir, 2), 0, 1), ErrorCode::kConfig);
}

TEST(Augment, VariantsShareGroundTruth) {
  TempDir dir("aug3");
  const RunConfig cfg = cube_config(dir, 5);
  const DatasetManifest m = cmd_augment(cfg, 3, 2);
  ASSERT_EQ(m.frames.size(), 15u);
  std::set<std::string> depths, images;
  for (const ManifestFrame& f : m.frames) {
    depths.insert(f.depth);
    images.insert(read_file(cfg.output / f.image_rgb));
  }
  EXPECT_EQ(depths.size(), 5u);
  EXPECT_EQ(images.size(), 15u);
  EXPECT_EQ(m.frames[4].id, "000001_v1");
  EXPECT_EQ(m.frames[4].pose_index, 1u);
  EXPECT_EQ(m.frames[4].variant, 1u);
  EXPECT_EQ(m.frames[4].labels, m.frames[3].labels);
  EXPECT_EQ(count_files(cfg.output / "labels"), 5);
  EXPECT_EQ(count_files(cfg.output / "images"), 30);
  const CheckReport r = cmd_check(cfg.output / "manifest.json");
  EXPECT_TRUE(r.ok()) << joined(r.problems);
  EXPECT_EQ(r.frames_checked, 15u);
}

TEST(Augment, SingleVariantEqualsGenerate) {
  TempDir dir("aug1");
  RunConfig cfg = cube_config(dir, 4);
  cfg.augmentation.light_cone_half_angle = 0.0;
  cmd_generate(cfg, 1);
  const auto generated = tree(cfg.output);
  cfg.output = dir / "augmented";
  cmd_augment(cfg, 1, 2);
  EXPECT_TRUE(generated == tree(cfg.output));
}

TEST(Eval, TruthAsEstimatesScoresZero) {
  TempDir dir("eval_truth");
  const RunConfig cfg = cube_config(dir, 4);
  const DatasetManifest m = cmd_generate(cfg, 1);
  std::vector<FramePose> truth;
  for (const ManifestFrame& f : m.frames) truth.push_back({f.id, f.pose});
  save_poses(truth, dir / "est.txt");
  EvalInput in;
  in.estimates = dir / "est.txt";
  const EvaluationReport r = cmd_eval(cfg.output / "manifest.json", in, {}, 1);
  EXPECT_EQ(r.frames.size(), 4u);
  EXPECT_EQ(r.mean_s, 0.0);

  truth.pop_back();
  save_poses(truth, dir / "short.txt");
  in.estimates = dir / "short.txt";
  const std::string msg = error_message([&] { cmd_eval(cfg.output / "manifest.json", in, {}, 1); });
  EXPECT_TRUE(contains(msg, "000003")) << msg;
  EXPECT_ERROR_CODE(cmd_eval(cfg.output / "manifest.json", in, {}, 1), ErrorCode::kMissingFrames);
}

TEST(Eval, RecoversPosesFromDatasetHeatmaps) {
  TempDir dir("eval_heat");
  RunConfig cfg = parse_run_config(R"({"seed": 3, "sampler": {"count": 3},
      "outputs": {"rgb": false}, "paths": {"mesh": ")" +
                                       (kAssets / "spacecraft.obj").string() + R"(", "keypoints": ")" +
                                       (kAssets / "spacecraft_keypoints.json").string() +
                                       R"(", "output": "out"}})",
                                   dir.path());
  cmd_generate(cfg, 1);
  EvalInput in;
  in.dataset_heatmaps = true;
  std::vector<FramePose> recovered;
  const EvaluationReport r = cmd_eval(cfg.output / "manifest.json", in, cfg.ransac, 2, &recovered);
  ASSERT_EQ(recovered.size(), 3u);
  EXPECT_LT(r.mean_s, 0.02);
  for (const FrameScore& f : r.frames) EXPECT_LT(f.scores.e_q, 0.5 * 3.14159265 / 180) << f.frame;
  // Same RANSAC seed, same result.
  std::vector<FramePose> again;
  cmd_eval(cfg.output / "manifest.json", in, cfg.ransac, 1, &again);
  EXPECT_EQ(recovered, again);
}

TEST(Eval, HeatmapDirectoryMustCoverEveryFrame) {
  TempDir dir("eval_dir");
  const RunConfig cfg = cube_config(dir, 3);
  const DatasetManifest m = cmd_generate(cfg, 1);
  fs::create_directories(dir / "pred");
  for (int i : {0, 2}) {
    fs::copy_file(cfg.output / m.frames[i].heatmaps, dir / "pred" / (m.frames[i].id + ".spnh"));
  }
  EvalInput in;
  in.heatmap_dir = dir / "pred";
  const std::string msg = error_message([&] { cmd_eval(cfg.output / "manifest.json", in, {}, 1); });
  EXPECT_TRUE(contains(msg, "000001")) << msg;
  EXPECT_ERROR_CODE(cmd_eval(cfg.output / "manifest.json", in, {}, 1), ErrorCode::kMissingFrames);

  EvalInput both = in;
  both.dataset_heatmaps = true;
  EXPECT_ERROR_CODE(cmd_eval(cfg.output / "manifest.json", both, {}, 1), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(cmd_eval(cfg.output / "manifest.json", EvalInput{}, {}, 1), ErrorCode::kInvalidArgument);
}

TEST(SampleRunPoses, CountIdsAndDeterminism) {
  TempDir dir("sample");
  RunConfig cfg = cube_config(dir, 12);
  const auto a = sample_run_poses(cfg);
  ASSERT_EQ(a.size(), 12u);
  EXPECT_EQ(a[11].frame, "000011");
  EXPECT_EQ(a, sample_run_poses(cfg));
  cfg.frame_count = 5;
  const auto b = sample_run_poses(cfg);
  // Frame i depends only on (seed, i).
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(ExportUi, CubeBundle) {
  TempDir dir("ui");
  write_file(dir / "kp.json", cube_keypoints());
  cmd_export_ui(kAssets / "cube.obj", dir / "kp.json", std::nullopt, dir / "bundle");
  const auto mesh = nlohmann::json::parse(read_file(dir / "bundle" / "mesh.json"));
  EXPECT_EQ(mesh["positions"].size(), 8u);
  EXPECT_EQ(mesh["triangles"].size(), 12u);
  EXPECT_EQ(read_file(dir / "bundle" / "keypoints.json"), read_file(dir / "kp.json"));
  // Bundled keypoints parse back losslessly.
  EXPECT_EQ(parse_keypoints(read_file(dir / "bundle" / "keypoints.json")), parse_keypoints(cube_keypoints()));
  EXPECT_FALSE(fs::exists(dir / "bundle" / "sample"));
}

TEST(ExportUi, SampleFrame) {
  TempDir dir("ui_sample");
  const RunConfig cfg = cube_config(dir, 2);
  const DatasetManifest m = cmd_generate(cfg, 1);
  cmd_export_ui(kAssets / "cube.obj", std::nullopt, UiSample{cfg.output / "manifest.json", "000001"},
                dir / "bundle");
  EXPECT_FALSE(fs::exists(dir / "bundle" / "keypoints.json"));
  EXPECT_EQ(read_file(dir / "bundle" / "sample" / "image.png"), read_file(cfg.output / m.frames[1].image_rgb));
  const auto frame = nlohmann::json::parse(read_file(dir / "bundle" / "sample" / "frame.json"));
  EXPECT_EQ(frame["frame"], "000001");
  EXPECT_EQ(frame["camera"]["width"], 64);
  EXPECT_EQ(frame["pose"]["v"][2].get<double>(), m.frames[1].pose.translation.z());
  EXPECT_ERROR_CODE(cmd_export_ui(kAssets / "cube.obj", std::nullopt,
                                  UiSample{cfg.output / "manifest.json", "nope"}, dir / "b2"),
                    ErrorCode::kInvalidArgument);
}
