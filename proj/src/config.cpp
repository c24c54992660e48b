#include "satsynth/config.hpp"

#include "json_util.hpp"
#include "satsynth/error.hpp"

#include <cmath>

namespace satsynth {

using detail::Json;
namespace fs = std::filesystem;

namespace {

// Typed access to one config object; every failure is a kConfig error naming
// the dotted key.
class Section {
 public:
  Section(const Json& j, std::string name, std::initializer_list<std::string_view> allowed)
      : j_(j), name_(std::move(name)) {
    detail::reject_unknown_keys(j, allowed, name_, ErrorCode::kConfig);
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& raw(const char* key) const { return j_.at(key); }
  std::string key(const char* k) const { return name_ + "." + k; }

  double number(const char* k, double fallback) const {
    if (!has(k)) return fallback;
    if (!j_[k].is_number()) fail(k, "expected a number");
    const double x = j_[k].get<double>();
    if (!std::isfinite(x)) fail(k, "must be finite");
    return x;
  }
  bool boolean(const char* k, bool fallback) const {
    if (!has(k)) return fallback;
    if (!j_[k].is_boolean()) fail(k, "expected true or false");
    return j_[k].get<bool>();
  }
  std::int64_t integer(const char* k, std::int64_t fallback) const {
    if (!has(k)) return fallback;
    if (!j_[k].is_number_integer()) fail(k, "expected an integer");
    return j_[k].get<std::int64_t>();
  }
  std::string string(const char* k, const std::string& fallback) const {
    if (!has(k)) return fallback;
    if (!j_[k].is_string()) fail(k, "expected a string");
    return j_[k].get<std::string>();
  }
  Vec3 vec3(const char* k, const Vec3& fallback) const {
    if (!has(k)) return fallback;
    try {
      return detail::vec3_from_json(j_[k], key(k));
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, e.what());
    }
  }
  Section child(const char* k, std::initializer_list<std::string_view> allowed) const {
    static const Json empty = Json::object();
    return Section(has(k) ? j_[k] : empty, key(k), allowed);
  }

  [[noreturn]] void fail(const char* k, const std::string& what) const {
    throw Error(ErrorCode::kConfig, key(k) + ": " + what);
  }

 private:
  const Json& j_;
  std::string name_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

Material parse_material(const Section& s, Material m) {
  m.albedo = s.vec3("albedo", m.albedo);
  m.specular_strength = s.number("specular_strength", m.specular_strength);
  m.shininess = s.number("shininess", m.shininess);
  m.high_quality = s.boolean("high_quality", m.high_quality);
  return m;
}

LightPreset parse_light(const Json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw Error(ErrorCode::kConfig, name + ": light needs a string \"type\"");
  }
  const std::string type = j["type"].get<std::string>();
  if (type == "spotlight") {
    const Section s(j, name, {"type", "position", "direction", "cone_half_angle", "intensity"});
    Spotlight l;
    l.position = s.vec3("position", l.position);
    l.direction = s.vec3("direction", l.direction).normalized();
    l.cone_half_angle = s.number("cone_half_angle", l.cone_half_angle);
    l.intensity = s.number("intensity", l.intensity);
    return l;
  }
  if (type == "sunlight") {
    const Section s(j, name, {"type", "direction", "intensity"});
    Sunlight l;
    l.direction = s.vec3("direction", l.direction).normalized();
    l.intensity = s.number("intensity", l.intensity);
    return l;
  }
  if (type == "ambient") {
    const Section s(j, name, {"type", "intensity"});
    AmbientLight l;
    l.intensity = s.number("intensity", l.intensity);
    return l;
  }
  throw Error(ErrorCode::kConfig, name + ": unknown light type \"" + type + "\"");
}

}  // namespace

void set_seed(RunConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.sampler.seed = seed;
  config.augmentation.seed = seed;
  config.ransac.seed = seed;
}

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
  Json doc;
  try {
    doc = detail::parse_json(text, "config");
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  const Section top(doc, "config",
                    {"seed", "name", "camera", "lights", "background", "materials", "effects",
                     "outputs", "sampler", "augmentation", "evaluation", "paths"});
  RunConfig cfg;
  if (top.has("seed") && !doc["seed"].is_number_unsigned()) top.fail("seed", "expected an unsigned integer");
  const std::uint64_t seed = top.has("seed") ? doc["seed"].get<std::uint64_t>() : cfg.seed;
  cfg.name = top.string("name", cfg.name);

  // camera
  {
    Json cam = doc.contains("camera") ? doc["camera"] : Json::object();
    if (!cam.is_object()) top.fail("camera", "expected an object");
    if (cam.contains("supersample")) {
      if (!cam["supersample"].is_boolean()) top.fail("camera", "supersample must be true or false");
      cfg.scene.supersample = cam["supersample"].get<bool>();
      cam.erase("supersample");
    }
    cfg.scene.camera = detail::camera_from_json(cam, "config.camera", ErrorCode::kConfig);
  }

  // lights
  {
    const Section s = top.child("lights", {"presets", "shadows", "ambient_occlusion", "ao_samples"});
    cfg.scene.shadows = s.boolean("shadows", cfg.scene.shadows);
    cfg.scene.ambient_occlusion = s.boolean("ambient_occlusion", cfg.scene.ambient_occlusion);
    cfg.scene.ao_samples = static_cast<int>(s.integer("ao_samples", cfg.scene.ao_samples));
    if (s.has("presets")) {
      const Json& presets = s.raw("presets");
      if (!presets.is_array()) s.fail("presets", "expected an array");
      for (std::size_t i = 0; i < presets.size(); ++i) {
        cfg.scene.lights.push_back(
            parse_light(presets[i], "config.lights.presets[" + std::to_string(i) + "]"));
      }
    } else {
      cfg.scene.lights.push_back(Sunlight{Vec3(1, 1, 2).normalized(), 3.0});
      cfg.scene.lights.push_back(AmbientLight{0.05});
    }
  }

  // background
  {
    const Section s = top.child("background", {"type", "color", "path", "placement"});
    const std::string type = s.string("type", "uniform");
    if (type == "uniform") {
      if (s.has("path") || s.has("placement")) s.fail("type", "uniform background takes only color");
      cfg.scene.background = UniformBackground{s.vec3("color", Vec3::Zero())};
    } else if (type == "image") {
      if (s.has("color")) s.fail("type", "image background takes path and placement");
      ImageBackground bg;
      bg.path = resolve(base_dir, s.string("path", "")).string();
      if (bg.path.empty()) s.fail("path", "image background needs a path");
      const std::string placement = s.string("placement", "fixed");
      if (placement == "fixed") bg.placement = Placement::kFixed;
      else if (placement == "random") bg.placement = Placement::kRandomPerFrame;
      else s.fail("placement", "expected \"fixed\" or \"random\"");
      cfg.scene.background = bg;
    } else {
      s.fail("type", "expected \"uniform\" or \"image\"");
    }
  }

  // materials
  {
    const Section s = top.child("materials", {"quality", "default", "groups"});
    cfg.scene.material_quality = s.boolean("quality", cfg.scene.material_quality);
    cfg.scene.materials.fallback =
        parse_material(s.child("default", {"albedo", "specular_strength", "shininess", "high_quality"}), cfg.scene.materials.fallback);
    if (s.has("groups")) {
      const Json& groups = s.raw("groups");
      if (!groups.is_object()) s.fail("groups", "expected an object keyed by group name");
      for (const auto& [name, value] : groups.items()) {
        const Section m(value, s.key("groups") + "." + name, {"albedo", "specular_strength", "shininess", "high_quality"});
        cfg.scene.materials.by_name[name] = parse_material(m, cfg.scene.materials.fallback);
      }
    }
  }

  // effects
  {
    const Section s = top.child("effects", {"noise", "bloom", "color"});
    SensorEffects& e = cfg.scene.effects;
    const Section noise = s.child("noise", {"enabled", "gaussian_sigma", "shot_gain"});
    e.noise.enabled = noise.boolean("enabled", e.noise.enabled);
    e.noise.gaussian_sigma = noise.number("gaussian_sigma", e.noise.gaussian_sigma);
    e.noise.shot_gain = noise.number("shot_gain", e.noise.shot_gain);
    const Section bloom = s.child("bloom", {"enabled", "threshold", "intensity", "radius"});
    e.bloom.enabled = bloom.boolean("enabled", e.bloom.enabled);
    e.bloom.threshold = bloom.number("threshold", e.bloom.threshold);
    e.bloom.intensity = bloom.number("intensity", e.bloom.intensity);
    e.bloom.radius = bloom.number("radius", e.bloom.radius);
    const Section color =
        s.child("color", {"enabled", "saturation", "contrast", "temperature_shift"});
    e.color.enabled = color.boolean("enabled", e.color.enabled);
    e.color.saturation = color.number("saturation", e.color.saturation);
    e.color.contrast = color.number("contrast", e.color.contrast);
    e.color.temperature_shift = color.number("temperature_shift", e.color.temperature_shift);
  }

  // outputs
  {
    const Section s = top.child("outputs", {"rgb", "gray", "depth", "segmentation", "dense_coords",
                                            "heatmaps", "bbox", "heatmap_sigma"});
    OutputFlags& o = cfg.scene.outputs;
    o.rgb = s.boolean("rgb", o.rgb);
    o.gray = s.boolean("gray", o.gray);
    o.depth = s.boolean("depth", o.depth);
    o.segmentation = s.boolean("segmentation", o.segmentation);
    o.dense_coords = s.boolean("dense_coords", o.dense_coords);
    o.heatmaps = s.boolean("heatmaps", o.heatmaps);
    o.bbox = s.boolean("bbox", o.bbox);
    cfg.heatmap_sigma = s.number("heatmap_sigma", cfg.heatmap_sigma);
    if (!(cfg.heatmap_sigma > 0.0)) s.fail("heatmap_sigma", "must be > 0");
  }

  // sampler
  {
    const Section s = top.child("sampler", {"count", "z_min", "z_max", "lateral_margin"});
    const std::int64_t count = s.integer("count", static_cast<std::int64_t>(cfg.frame_count));
    if (count < 0) s.fail("count", "must be >= 0");
    cfg.frame_count = static_cast<std::size_t>(count);
    cfg.sampler.z_min = s.number("z_min", cfg.sampler.z_min);
    cfg.sampler.z_max = s.number("z_max", cfg.sampler.z_max);
    cfg.sampler.lateral_margin = s.number("lateral_margin", cfg.sampler.lateral_margin);
  }

  // augmentation
  {
    const Section s = top.child("augmentation", {"k", "light_cone_half_angle", "intensity_scale",
                                                 "background_shuffle", "toggle_probability"});
    AugmentationPlan& a = cfg.augmentation;
    a.k = static_cast<int>(s.integer("k", a.k));
    a.light_cone_half_angle = s.number("light_cone_half_angle", a.light_cone_half_angle);
    if (s.has("intensity_scale")) {
      const Json& r = s.raw("intensity_scale");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        s.fail("intensity_scale", "expected [min, max]");
      }
      a.intensity_scale_min = r[0].get<double>();
      a.intensity_scale_max = r[1].get<double>();
    }
    a.background_shuffle = s.boolean("background_shuffle", a.background_shuffle);
    const Section t = s.child("toggle_probability", {"material", "noise", "bloom", "color"});
    a.material_toggle_probability = t.number("material", a.material_toggle_probability);
    a.noise_toggle_probability = t.number("noise", a.noise_toggle_probability);
    a.bloom_toggle_probability = t.number("bloom", a.bloom_toggle_probability);
    a.color_toggle_probability = t.number("color", a.color_toggle_probability);
  }

  // evaluation
  {
    const Section s =
        top.child("evaluation", {"inlier_threshold_px", "max_iterations", "confidence"});
    cfg.ransac.inlier_threshold_px = s.number("inlier_threshold_px", cfg.ransac.inlier_threshold_px);
    cfg.ransac.max_iterations = static_cast<int>(s.integer("max_iterations", cfg.ransac.max_iterations));
    cfg.ransac.confidence = s.number("confidence", cfg.ransac.confidence);
  }

  // paths
  {
    const Section s = top.child("paths", {"mesh", "keypoints", "poses", "output"});
    cfg.mesh = resolve(base_dir, s.string("mesh", ""));
    cfg.keypoints = resolve(base_dir, s.string("keypoints", ""));
    cfg.poses = resolve(base_dir, s.string("poses", ""));
    cfg.output = resolve(base_dir, s.string("output", cfg.output.string()));
    if (cfg.mesh.empty()) s.fail("mesh", "a mesh path is required");
  }

  set_seed(cfg, seed);
  try {
    validate(cfg.scene);
    validate(cfg.sampler);
    validate(cfg.augmentation);
    validate(cfg.ransac);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kIo, "config not found: " + path.string());
  const fs::path base = fs::absolute(path).parent_path();
  return parse_run_config(detail::read_text_file(path), base);
}

}  // namespace satsynth
