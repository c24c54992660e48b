#include "satsynth/scene.hpp"

#include "satsynth/error.hpp"

#include <cmath>
#include <numbers>

namespace satsynth {

namespace {

constexpr double kUnitDirectionTolerance = 1e-6;

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

bool is_unit(const Vec3& v) {
  return v.allFinite() && std::abs(v.norm() - 1.0) <= kUnitDirectionTolerance;
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

const Material& MaterialTable::lookup(const std::string& name) const {
  const auto it = by_name.find(name);
  return it == by_name.end() ? fallback : it->second;
}

void validate(const Material& m) {
  require(in_unit_interval(m.albedo.x()) && in_unit_interval(m.albedo.y()) &&
              in_unit_interval(m.albedo.z()),
          "material albedo must lie in [0, 1]");
  require(in_unit_interval(m.specular_strength), "material specular_strength must lie in [0, 1]");
  require(m.shininess > 0.0 && std::isfinite(m.shininess), "material shininess must be > 0");
}

void validate(const LightPreset& light) {
  std::visit(
      [](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        require(l.intensity >= 0.0 && std::isfinite(l.intensity),
                "light intensity must be non-negative");
        if constexpr (std::is_same_v<T, Spotlight>) {
          require(l.position.allFinite(), "spotlight position must be finite");
          require(is_unit(l.direction), "spotlight direction must be unit length");
          require(l.cone_half_angle > 0.0 && l.cone_half_angle < std::numbers::pi,
                  "spotlight cone half-angle must lie in (0, pi)");
        } else if constexpr (std::is_same_v<T, Sunlight>) {
          require(is_unit(l.direction), "sunlight direction must be unit length");
        }
      },
      light);
}

void validate(const SensorEffects& e) {
  require(in_unit_interval(e.noise.gaussian_sigma), "noise gaussian_sigma must lie in [0, 1]");
  require(e.noise.shot_gain >= 0.0 && std::isfinite(e.noise.shot_gain),
          "noise shot_gain must be >= 0");
  require(in_unit_interval(e.bloom.threshold), "bloom threshold must lie in [0, 1]");
  require(e.bloom.intensity >= 0.0 && std::isfinite(e.bloom.intensity),
          "bloom intensity must be >= 0");
  require(e.bloom.radius >= 0.0 && std::isfinite(e.bloom.radius), "bloom radius must be >= 0");
  require(std::isfinite(e.color.saturation) && std::isfinite(e.color.contrast) &&
              std::isfinite(e.color.temperature_shift),
          "color adjustments must be finite");
}

void validate(const SceneConfig& scene) {
  for (const LightPreset& light : scene.lights) validate(light);
  validate(scene.materials.fallback);
  for (const auto& [name, material] : scene.materials.by_name) validate(material);
  validate(scene.effects);
  require(scene.ao_samples >= 1, "ambient occlusion needs at least one sample");
  require(scene.outputs.any(), "at least one output flag must be set");
  if (const auto* uniform = std::get_if<UniformBackground>(&scene.background)) {
    require(uniform->color.allFinite() && (uniform->color.array() >= 0.0).all(),
            "background color must be finite and non-negative");
  }
}

}  // namespace satsynth
