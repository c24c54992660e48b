#pragma once

#include "satsynth/camera.hpp"
#include "satsynth/geometry.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace satsynth {

struct Material {
  Vec3 albedo{0.8, 0.8, 0.8};
  double specular_strength = 0.0;
  double shininess = 32.0;
  /// Enables the Blinn-Phong term (only when the scene's material_quality is on).
  bool high_quality = false;

  bool operator==(const Material&) const = default;
};

/// Materials matched by mesh group name; unmatched groups use `fallback`.
struct MaterialTable {
  Material fallback;
  std::map<std::string, Material> by_name;

  const Material& lookup(const std::string& name) const;
  bool operator==(const MaterialTable&) const = default;
};

/// Point light with a cone, fixed in the camera frame.
struct Spotlight {
  Vec3 position = Vec3::Zero();
  Vec3 direction{0, 0, 1};
  double cone_half_angle = 0.5;
  double intensity = 1.0;
  bool operator==(const Spotlight&) const = default;
};

/// Directional light; `direction` is the direction of travel of the rays,
/// in the camera frame.
struct Sunlight {
  Vec3 direction{0, 0, 1};
  double intensity = 1.0;
  bool operator==(const Sunlight&) const = default;
};

struct AmbientLight {
  double intensity = 0.0;
  bool operator==(const AmbientLight&) const = default;
};

using LightPreset = std::variant<Spotlight, Sunlight, AmbientLight>;

struct NoiseParams {
  bool enabled = false;
  double gaussian_sigma = 0.0;
  double shot_gain = 0.0;
  bool operator==(const NoiseParams&) const = default;
};

struct BloomParams {
  bool enabled = false;
  double threshold = 1.0;
  double intensity = 0.0;
  double radius = 0.0;
  bool operator==(const BloomParams&) const = default;
};

struct ColorParams {
  bool enabled = false;
  double saturation = 1.0;
  double contrast = 1.0;
  double temperature_shift = 0.0;
  bool operator==(const ColorParams&) const = default;
};

struct SensorEffects {
  NoiseParams noise;
  BloomParams bloom;
  ColorParams color;
  bool operator==(const SensorEffects&) const = default;
};

struct UniformBackground {
  Vec3 color = Vec3::Zero();
  bool operator==(const UniformBackground&) const = default;
};

enum class Placement { kFixed, kRandomPerFrame };

struct ImageBackground {
  std::string path;
  Placement placement = Placement::kFixed;
  bool operator==(const ImageBackground&) const = default;
};

using Background = std::variant<UniformBackground, ImageBackground>;

struct OutputFlags {
  bool rgb = true;
  bool gray = false;
  bool depth = true;
  bool segmentation = true;
  bool dense_coords = true;
  bool heatmaps = true;
  bool bbox = true;

  bool any() const { return rgb || gray || depth || segmentation || dense_coords || heatmaps || bbox; }
  bool operator==(const OutputFlags&) const = default;
};

struct SceneConfig {
  CameraModel camera{512, 512, 768, 768, 256, 256};
  std::vector<LightPreset> lights;
  Background background = UniformBackground{};
  bool shadows = true;
  bool ambient_occlusion = false;
  int ao_samples = 16;
  /// Global switch for high-quality (specular) materials.
  bool material_quality = true;
  MaterialTable materials;
  SensorEffects effects;
  OutputFlags outputs;
  /// 2x2 supersampling of the color buffer only.
  bool supersample = false;

  bool operator==(const SceneConfig&) const = default;
};

/// Throws kInvalidArgument on the first violated range or unit-length constraint.
void validate(const Material& material);
void validate(const LightPreset& light);
void validate(const SensorEffects& effects);
void validate(const SceneConfig& scene);

}  // namespace satsynth
