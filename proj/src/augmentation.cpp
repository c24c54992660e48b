#include "satsynth/augmentation.hpp"

#include "satsynth/error.hpp"
#include "satsynth/rng.hpp"

#include <cmath>
#include <numbers>

namespace satsynth {

void validate(const AugmentationPlan& plan) {
  auto fail = [](const char* what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (plan.k < 1) fail("augmentation k must be >= 1");
  if (!(plan.light_cone_half_angle >= 0.0 && plan.light_cone_half_angle <= std::numbers::pi)) {
    fail("augmentation light cone half-angle must be in [0, pi]");
  }
  if (!(plan.intensity_scale_min > 0.0) || !(plan.intensity_scale_max >= plan.intensity_scale_min) ||
      !std::isfinite(plan.intensity_scale_max)) {
    fail("augmentation intensity scale range must satisfy 0 < min <= max");
  }
  for (double p : {plan.material_toggle_probability, plan.noise_toggle_probability,
                   plan.bloom_toggle_probability, plan.color_toggle_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("augmentation toggle probabilities must be in [0, 1]");
  }
}

namespace {

// Uniform direction within `half_angle` of the unit vector `axis`.
Vec3 jitter_direction(const Vec3& axis, double half_angle, Rng& rng) {
  const double cos_theta = 1.0 - rng.uniform() * (1.0 - std::cos(half_angle));
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = axis.cross(helper).normalized();
  const Vec3 e2 = axis.cross(e1);
  return (cos_theta * axis + sin_theta * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
}

double intensity_scale(const AugmentationPlan& plan, Rng& rng) {
  const double u = rng.uniform();
  if (plan.intensity_scale_min == plan.intensity_scale_max) return plan.intensity_scale_min;
  const double lo = std::log(plan.intensity_scale_min), hi = std::log(plan.intensity_scale_max);
  return std::exp(lo + u * (hi - lo));
}

bool flip(double probability, Rng& rng) { return rng.uniform() < probability; }

}  // namespace

std::vector<SceneConfig> make_variants(const SceneConfig& base, const AugmentationPlan& plan,
                                       std::uint64_t stream) {
  validate(plan);
  std::vector<SceneConfig> variants;
  variants.reserve(plan.k);
  for (int i = 0; i < plan.k; ++i) {
    Rng rng = Rng::derive(plan.seed, StreamDomain::kAugmentation, stream,
                          static_cast<std::uint64_t>(i));
    SceneConfig v = base;
    for (LightPreset& light : v.lights) {
      std::visit(
          [&](auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (!std::is_same_v<T, AmbientLight>) {
              if (plan.light_cone_half_angle > 0.0) {
                l.direction = jitter_direction(l.direction, plan.light_cone_half_angle, rng);
              }
            }
            const double scale = intensity_scale(plan, rng);
            if (scale != 1.0) l.intensity *= scale;
          },
          light);
    }
    if (plan.background_shuffle) {
      if (auto* image = std::get_if<ImageBackground>(&v.background)) {
        image->placement = Placement::kRandomPerFrame;
      }
    }
    if (flip(plan.material_toggle_probability, rng)) v.material_quality = !v.material_quality;
    if (flip(plan.noise_toggle_probability, rng)) v.effects.noise.enabled = !v.effects.noise.enabled;
    if (flip(plan.bloom_toggle_probability, rng)) v.effects.bloom.enabled = !v.effects.bloom.enabled;
    if (flip(plan.color_toggle_probability, rng)) v.effects.color.enabled = !v.effects.color.enabled;
    variants.push_back(std::move(v));
  }
  return variants;
}

AugmentedFrame render_augmented(const Mesh& mesh, const Bvh& bvh, const KeypointSet& keypoints,
                                const Pose& pose, const std::vector<SceneConfig>& variants,
                                const FrameKey& key, double heatmap_sigma,
                                const RenderOptions& options) {
  if (variants.empty()) throw Error(ErrorCode::kInvalidArgument, "no variants to render");
  for (const SceneConfig& v : variants) {
    if (!(v.camera == variants.front().camera) || !(v.outputs == variants.front().outputs)) {
      throw Error(ErrorCode::kInvalidArgument, "variants must share camera and output flags");
    }
  }
  AugmentedFrame out;
  RenderOptions geometry = options;
  geometry.geometry_only = true;
  FrameKey k = key;
  k.variant = 0;
  const FrameBuffers geo = render_frame(mesh, bvh, pose, variants.front(), k, geometry);
  LabeledFrame labels = label_frame(geo, pose, variants.front(), keypoints, heatmap_sigma);
  out.ground_truth = std::move(labels.ground_truth);
  out.heatmaps = std::move(labels.heatmaps);

  const SceneConfig& first = variants.front();
  const bool want_images = first.outputs.rgb || first.outputs.gray;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    k.variant = i;
    if (!want_images) {
      out.images.emplace_back();
      continue;
    }
    RenderOptions shading = options;
    shading.geometry_only = false;
    const FrameBuffers fb = render_frame(mesh, bvh, pose, variants[i], k, shading);
    out.images.push_back(finish_images(fb, variants[i], k));
  }
  return out;
}

}  // namespace satsynth
