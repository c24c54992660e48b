#include "satsynth/manifest.hpp"

#include "json_util.hpp"
#include "satsynth/pose_sampling.hpp"

#include <set>

namespace satsynth {

using detail::Json;

namespace {

constexpr const char* kFormat = "satsynth-manifest";
constexpr int kVersion = 1;

std::string optional_string(const Json& obj, const char* key, const std::string& context) {
  if (!obj.contains(key)) return {};
  if (!obj[key].is_string()) throw Error(ErrorCode::kParse, context + "." + key + ": expected a string");
  return obj[key].get<std::string>();
}

std::uint64_t unsigned_field(const Json& obj, const char* key, const std::string& context) {
  if (!obj.contains(key) || !obj[key].is_number_unsigned()) {
    throw Error(ErrorCode::kParse, context + ": missing non-negative integer \"" + key + "\"");
  }
  return obj[key].get<std::uint64_t>();
}

}  // namespace

std::string format_camera(const CameraModel& camera) {
  return detail::dump(detail::camera_to_json(camera));
}

std::string format_manifest(const DatasetManifest& m) {
  Json frames = Json::array();
  for (const ManifestFrame& f : m.frames) {
    Json files = Json::object();
    auto put = [&](const char* key, const std::string& value) {
      if (!value.empty()) files[key] = value;
    };
    put("rgb", f.image_rgb);
    put("gray", f.image_gray);
    put("depth", f.depth);
    put("segmentation", f.segmentation);
    put("dense_coords", f.dense_coords);
    put("heatmaps", f.heatmaps);
    put("labels", f.labels);
    frames.push_back(Json{{"id", f.id},
                          {"pose", detail::pose_to_json(f.pose)},
                          {"pose_index", f.pose_index},
                          {"variant", f.variant},
                          {"files", std::move(files)}});
  }
  Json doc{{"format", kFormat},
           {"version", kVersion},
           {"name", m.name},
           {"camera", detail::camera_to_json(m.camera)},
           {"keypoints", m.keypoints},
           {"heatmap_sigma", m.heatmap_sigma},
           {"frames", std::move(frames)}};
  return detail::dump(doc);
}

DatasetManifest parse_manifest(const std::string& text) {
  const Json doc = detail::parse_json(text, "manifest");
  detail::reject_unknown_keys(
      doc, {"format", "version", "name", "camera", "keypoints", "heatmap_sigma", "frames"},
      "manifest", ErrorCode::kParse);
  if (!doc.contains("format") || doc["format"] != kFormat) {
    throw Error(ErrorCode::kParse, "manifest: not a dataset manifest");
  }
  if (!doc.contains("version") || doc["version"] != kVersion) {
    throw Error(ErrorCode::kParse, "manifest: unsupported version");
  }
  if (!doc.contains("camera") || !doc.contains("frames") || !doc["frames"].is_array()) {
    throw Error(ErrorCode::kParse, "manifest: missing camera or frames");
  }
  DatasetManifest m;
  m.name = optional_string(doc, "name", "manifest");
  m.camera = detail::camera_from_json(doc["camera"], "manifest.camera", ErrorCode::kParse);
  m.keypoints = optional_string(doc, "keypoints", "manifest");
  if (doc.contains("heatmap_sigma")) {
    if (!doc["heatmap_sigma"].is_number()) {
      throw Error(ErrorCode::kParse, "manifest.heatmap_sigma: expected a number");
    }
    m.heatmap_sigma = doc["heatmap_sigma"].get<double>();
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc["frames"].size(); ++i) {
    const Json& rec = doc["frames"][i];
    const std::string context = "manifest frame " + std::to_string(i);
    detail::reject_unknown_keys(rec, {"id", "pose", "pose_index", "variant", "files"}, context,
                                ErrorCode::kParse);
    ManifestFrame f;
    f.id = optional_string(rec, "id", context);
    if (f.id.empty()) throw Error(ErrorCode::kParse, context + ": missing id");
    if (!ids.insert(f.id).second) {
      throw Error(ErrorCode::kParse, context + ": duplicate frame id " + f.id);
    }
    if (!rec.contains("pose")) throw Error(ErrorCode::kParse, context + ": missing pose");
    detail::reject_unknown_keys(rec["pose"], {"q", "v"}, context + ".pose", ErrorCode::kParse);
    f.pose = detail::pose_from_json(rec["pose"], context, kPoseFileNormTolerance);
    f.pose_index = unsigned_field(rec, "pose_index", context);
    f.variant = unsigned_field(rec, "variant", context);
    if (rec.contains("files")) {
      const Json& files = rec["files"];
      const std::string fc = context + ".files";
      detail::reject_unknown_keys(
          files, {"rgb", "gray", "depth", "segmentation", "dense_coords", "heatmaps", "labels"}, fc,
          ErrorCode::kParse);
      f.image_rgb = optional_string(files, "rgb", fc);
      f.image_gray = optional_string(files, "gray", fc);
      f.depth = optional_string(files, "depth", fc);
      f.segmentation = optional_string(files, "segmentation", fc);
      f.dense_coords = optional_string(files, "dense_coords", fc);
      f.heatmaps = optional_string(files, "heatmaps", fc);
      f.labels = optional_string(files, "labels", fc);
    }
    m.frames.push_back(std::move(f));
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_text_file(path));
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  detail::write_text_file_atomic(path, format_manifest(manifest));
}

}  // namespace satsynth
