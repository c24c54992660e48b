#pragma once

#include "satsynth/bvh.hpp"
#include "satsynth/camera.hpp"
#include "satsynth/geometry.hpp"
#include "satsynth/mesh.hpp"
#include "satsynth/rng.hpp"
#include "satsynth/scene.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace satsynth {

/// Offset applied along the surface normal before casting secondary rays.
inline constexpr double kSecondaryRayOffset = 1e-4;

/// Camera ray through pixel coordinate (u, v). The origin is the camera
/// center; throws kNonConvergent if the distortion cannot be inverted there.
Ray generate_ray(const CameraModel& camera, double u, double v);

/// Light sources expressed in the frame of the surface being shaded.
struct PointSpot {
  Vec3 position;
  Vec3 direction;
  double cos_outer = 0.0;
  double cos_inner = 0.0;
  double intensity = 0.0;
};
struct Directional {
  Vec3 direction;
  double intensity = 0.0;
};
struct Ambient {
  double intensity = 0.0;
};
using ShadingLight = std::variant<PointSpot, Directional, Ambient>;

/// Re-expresses a camera-frame light in the model frame of `pose`. The
/// spotlight penumbra spans the outer 20% of the cone half-angle.
ShadingLight to_model_frame(const LightPreset& light, const Pose& pose);
/// Same conversion for a camera-frame shading point (identity pose).
ShadingLight to_shading_light(const LightPreset& light);

struct SurfacePoint {
  Vec3 position;
  /// Unit shading normal facing the viewer.
  Vec3 normal;
  /// Unit geometric normal on the viewer's side; used for ray offsets.
  Vec3 geometric_normal;
  /// Unit vector from the surface toward the viewer.
  Vec3 to_viewer;
};

/// Returns true when the segment from `ray.origin` along `ray.direction`
/// is blocked before `max_t`.
using OcclusionQuery = std::function<bool(const Ray& ray, double max_t)>;

/// Lambert (albedo / pi) plus, when `specular` is set, Blinn-Phong with
/// exponent = shininess, summed over lights with shadow visibility and
/// falloff; ambient adds intensity * albedo * ao_factor. Clamped below at 0.
/// A null occlusion query disables shadows.
Vec3 shade(const SurfacePoint& surface, const Material& material, bool specular,
           std::span<const ShadingLight> lights, const OcclusionQuery& occluded,
           double ao_factor = 1.0);

/// Unoccluded fraction of `samples` cosine-weighted hemisphere rays spread by
/// a Hammersley set with a per-point rotation drawn from `rng`.
double ambient_occlusion(const Vec3& point, const Vec3& normal, const Bvh& bvh, int samples,
                         double max_distance, Rng& rng);

/// Raw per-pixel output of one frame, row-major (row * width + col).
struct FrameBuffers {
  int width = 0;
  int height = 0;
  /// Linear light, 3 channels.
  std::vector<double> color;
  /// Camera-frame z of the nearest hit, +inf on background.
  std::vector<double> depth;
  /// Triangle index, or -1 on background.
  std::vector<std::int64_t> hit_triangle;
  /// Model-frame hit position (3 per pixel), NaN on background.
  std::vector<double> hit_point_model;
};

/// Stream identity of a rendered frame.
struct FrameKey {
  std::uint64_t seed = 0;
  std::uint64_t frame = 0;
  std::uint64_t variant = 0;
};

/// Key shared by all per-pixel random processes of a frame (AO, noise).
std::uint64_t frame_stream_key(const FrameKey& key);

struct RenderOptions {
  int threads = 1;
  /// Skips shading; color stays zero.
  bool geometry_only = false;
};

/// Ray traces one frame. Output is bit-identical for any thread count.
/// Throws before any pixel work if the pose is not renderable or the
/// background image cannot be loaded.
FrameBuffers render_frame(const Mesh& mesh, const Bvh& bvh, const Pose& pose,
                          const SceneConfig& scene, const FrameKey& key,
                          const RenderOptions& options = {});

}  // namespace satsynth
