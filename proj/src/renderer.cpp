#include "satsynth/renderer.hpp"

#include "satsynth/error.hpp"
#include "satsynth/image_io.hpp"
#include "satsynth/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace satsynth {

namespace {

constexpr double kPenumbraFraction = 0.8;

double smoothstep(double edge0, double edge1, double x) {
  if (edge1 == edge0) return x >= edge1 ? 1.0 : 0.0;
  const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

double radical_inverse_base2(std::uint32_t bits) {
  bits = (bits << 16u) | (bits >> 16u);
  bits = ((bits & 0x55555555u) << 1u) | ((bits & 0xAAAAAAAAu) >> 1u);
  bits = ((bits & 0x33333333u) << 2u) | ((bits & 0xCCCCCCCCu) >> 2u);
  bits = ((bits & 0x0F0F0F0Fu) << 4u) | ((bits & 0xF0F0F0F0u) >> 4u);
  bits = ((bits & 0x00FF00FFu) << 8u) | ((bits & 0xFF00FF00u) >> 8u);
  return static_cast<double>(bits) * 0x1.0p-32;
}

void orthonormal_basis(const Vec3& n, Vec3& t, Vec3& b) {
  // Duff et al., "Building an Orthonormal Basis, Revisited".
  const double sign = std::copysign(1.0, n.z());
  const double a = -1.0 / (sign + n.z());
  const double c = n.x() * n.y() * a;
  t = Vec3(1.0 + sign * n.x() * n.x() * a, sign * c, -sign * n.x());
  b = Vec3(c, sign + n.y() * n.y() * a, -n.y());
}

ShadingLight make_spot(const Vec3& position, const Vec3& direction, const Spotlight& s) {
  return PointSpot{position, direction, std::cos(s.cone_half_angle),
                   std::cos(kPenumbraFraction * s.cone_half_angle), s.intensity};
}

}  // namespace

Ray generate_ray(const CameraModel& camera, double u, double v) {
  const Vec2 n = camera.pixel_to_normalized(u, v);
  return Ray{Vec3::Zero(), Vec3(n.x(), n.y(), 1.0).normalized()};
}

ShadingLight to_shading_light(const LightPreset& light) {
  return std::visit(
      [](const auto& l) -> ShadingLight {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Spotlight>) {
          return make_spot(l.position, l.direction, l);
        } else if constexpr (std::is_same_v<T, Sunlight>) {
          return Directional{l.direction, l.intensity};
        } else {
          return Ambient{l.intensity};
        }
      },
      light);
}

ShadingLight to_model_frame(const LightPreset& light, const Pose& pose) {
  const Mat3 rt = pose.rotation.to_matrix().transpose();
  return std::visit(
      [&](const auto& l) -> ShadingLight {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, Spotlight>) {
          return make_spot(rt * (l.position - pose.translation), rt * l.direction, l);
        } else if constexpr (std::is_same_v<T, Sunlight>) {
          return Directional{rt * l.direction, l.intensity};
        } else {
          return Ambient{l.intensity};
        }
      },
      light);
}

Vec3 shade(const SurfacePoint& s, const Material& material, bool specular,
           std::span<const ShadingLight> lights, const OcclusionQuery& occluded,
           double ao_factor) {
  Vec3 color = Vec3::Zero();
  const Vec3 diffuse = material.albedo / std::numbers::pi;
  const Vec3 shadow_origin = s.position + kSecondaryRayOffset * s.geometric_normal;

  auto direct = [&](const Vec3& to_light, double radiance, double max_t) {
    const double cosine = s.normal.dot(to_light);
    if (cosine <= 0.0 || radiance <= 0.0) return;
    if (occluded && occluded(Ray{shadow_origin, to_light}, max_t)) return;
    Vec3 term = diffuse * cosine;
    if (specular && material.specular_strength > 0.0) {
      const Vec3 half = (to_light + s.to_viewer).normalized();
      const double nh = std::max(0.0, s.normal.dot(half));
      term += Vec3::Constant(material.specular_strength * std::pow(nh, material.shininess));
    }
    color += radiance * term;
  };

  for (const ShadingLight& light : lights) {
    if (const auto* sun = std::get_if<Directional>(&light)) {
      direct(-sun->direction, sun->intensity, kInfinity);
    } else if (const auto* spot = std::get_if<PointSpot>(&light)) {
      const Vec3 offset = spot->position - s.position;
      const double dist2 = offset.squaredNorm();
      if (dist2 == 0.0) continue;
      const double dist = std::sqrt(dist2);
      const Vec3 to_light = offset / dist;
      const double cone = smoothstep(spot->cos_outer, spot->cos_inner,
                                     spot->direction.dot(-to_light));
      direct(to_light, spot->intensity * cone / dist2, dist - kSecondaryRayOffset);
    } else if (const auto* ambient = std::get_if<Ambient>(&light)) {
      color += ambient->intensity * ao_factor * material.albedo;
    }
  }
  return color.cwiseMax(0.0);
}

double ambient_occlusion(const Vec3& point, const Vec3& normal, const Bvh& bvh, int samples,
                         double max_distance, Rng& rng) {
  if (samples <= 0) return 1.0;
  Vec3 t, b;
  orthonormal_basis(normal, t, b);
  const double shift_u = rng.uniform();
  const double shift_v = rng.uniform();
  const Vec3 origin = point + kSecondaryRayOffset * normal;
  int open = 0;
  for (int i = 0; i < samples; ++i) {
    double u = (i + 0.5) / samples + shift_u;
    double v = radical_inverse_base2(static_cast<std::uint32_t>(i)) + shift_v;
    u -= std::floor(u);
    v -= std::floor(v);
    // Cosine-weighted hemisphere (Malley's method).
    const double r = std::sqrt(u);
    const double phi = 2.0 * std::numbers::pi * v;
    const Vec3 dir =
        (r * std::cos(phi) * t + r * std::sin(phi) * b + std::sqrt(std::max(0.0, 1.0 - u)) * normal)
            .normalized();
    if (!bvh.occluded(Ray{origin, dir}, 0.0, max_distance)) ++open;
  }
  return static_cast<double>(open) / samples;
}

namespace {

struct BackgroundSource {
  Vec3 uniform = Vec3::Zero();
  ImageF image;  // linear light, already cropped to the frame
  bool has_image = false;

  Vec3 at(int row, int col) const {
    if (!has_image) return uniform;
    return {image.at(row, col, 0), image.at(row, col, 1), image.at(row, col, 2)};
  }
};

BackgroundSource resolve_background(const SceneConfig& scene, const FrameKey& key) {
  BackgroundSource bg;
  if (const auto* u = std::get_if<UniformBackground>(&scene.background)) {
    bg.uniform = u->color;
    return bg;
  }
  const auto& spec = std::get<ImageBackground>(scene.background);
  if (!std::filesystem::exists(spec.path)) {
    throw Error(ErrorCode::kIo, "background image not found: " + spec.path);
  }
  const ByteImage src = read_png(spec.path);
  const int w = scene.camera.width(), h = scene.camera.height();
  if (src.width < w || src.height < h) {
    std::ostringstream msg;
    msg << "background image " << spec.path << " (" << src.width << "x" << src.height
        << ") is smaller than the camera (" << w << "x" << h << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  int x0 = (src.width - w) / 2;
  int y0 = (src.height - h) / 2;
  if (spec.placement == Placement::kRandomPerFrame) {
    Rng rng = Rng::derive(key.seed, StreamDomain::kBackground, key.frame, key.variant);
    x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(src.width - w) + 1));
    y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(src.height - h) + 1));
  }
  double lut[256];
  for (int i = 0; i < 256; ++i) lut[i] = std::pow(i / 255.0, 2.2);
  bg.image = ImageF(w, h, 3);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      for (int c = 0; c < 3; ++c) {
        const int sc = src.channels == 1 ? 0 : c;
        bg.image.at(row, col, c) = lut[src.at(row + y0, col + x0, sc)];
      }
    }
  }
  bg.has_image = true;
  return bg;
}

}  // namespace

std::uint64_t frame_stream_key(const FrameKey& key) { return mix64(key.frame) ^ key.variant; }

FrameBuffers render_frame(const Mesh& mesh, const Bvh& bvh, const Pose& pose,
                          const SceneConfig& scene, const FrameKey& key,
                          const RenderOptions& options) {
  validate(scene);
  require_renderable(pose);
  const CameraModel& camera = scene.camera;
  const BackgroundSource background =
      options.geometry_only ? BackgroundSource{} : resolve_background(scene, key);

  const int width = camera.width(), height = camera.height();
  const std::size_t pixels = static_cast<std::size_t>(width) * height;
  FrameBuffers fb;
  fb.width = width;
  fb.height = height;
  fb.color.assign(pixels * 3, 0.0);
  fb.depth.assign(pixels, kInfinity);
  fb.hit_triangle.assign(pixels, -1);
  fb.hit_point_model.assign(pixels * 3, std::numeric_limits<double>::quiet_NaN());

  const Mat3 rotation = pose.rotation.to_matrix();
  const Mat3 rt = rotation.transpose();
  const Vec3 eye_model = -(rt * pose.translation);

  std::vector<ShadingLight> lights;
  lights.reserve(scene.lights.size());
  for (const LightPreset& l : scene.lights) lights.push_back(to_model_frame(l, pose));

  std::vector<const Material*> face_materials;
  face_materials.reserve(mesh.material_names().size());
  for (const std::string& name : mesh.material_names()) {
    face_materials.push_back(&scene.materials.lookup(name));
  }

  OcclusionQuery occlusion;
  if (scene.shadows) {
    occlusion = [&bvh](const Ray& ray, double max_t) { return bvh.occluded(ray, 0.0, max_t); };
  }
  const double ao_distance = mesh.diagonal();
  const auto& tris = mesh.triangles();
  const auto& verts = mesh.vertices();
  const auto& normals = mesh.normals();

  struct Sample {
    bool hit = false;
    Vec3 color = Vec3::Zero();
    Vec3 model_point = Vec3::Zero();
    std::int64_t triangle = -1;
  };

  // `ao_rng` is only touched when ambient occlusion is enabled.
  auto trace = [&](double u, double v, bool want_color, Rng& ao_rng) -> Sample {
    Sample s;
    const Ray cam_ray = generate_ray(camera, u, v);
    const Ray ray{eye_model, rt * cam_ray.direction};
    const auto hit = bvh.intersect(ray);
    if (!hit) return s;
    s.hit = true;
    s.triangle = hit->triangle;
    const Triangle& tri = tris[hit->triangle];
    const double b0 = 1.0 - hit->b1 - hit->b2;
    s.model_point = b0 * verts[tri[0]] + hit->b1 * verts[tri[1]] + hit->b2 * verts[tri[2]];
    if (!want_color) return s;

    Vec3 geometric = (verts[tri[1]] - verts[tri[0]]).cross(verts[tri[2]] - verts[tri[0]]);
    geometric.normalize();
    Vec3 shading = b0 * normals[tri[0]] + hit->b1 * normals[tri[1]] + hit->b2 * normals[tri[2]];
    const double len = shading.norm();
    shading = len > 0.0 ? Vec3(shading / len) : geometric;
    if (geometric.dot(ray.direction) > 0.0) {
      geometric = -geometric;
      shading = -shading;
    }
    const SurfacePoint surface{s.model_point, shading, geometric, -ray.direction};
    double ao = 1.0;
    if (scene.ambient_occlusion) {
      ao = ambient_occlusion(s.model_point, geometric, bvh, scene.ao_samples, ao_distance, ao_rng);
    }
    const Material& material = *face_materials[mesh.face_material()[hit->triangle]];
    const bool specular = scene.material_quality && material.high_quality;
    s.color = shade(surface, material, specular, lights, occlusion, ao);
    return s;
  };

  const bool want_color = !options.geometry_only;
  const std::uint64_t stream_key = frame_stream_key(key);
  parallel_for(static_cast<std::size_t>(height), options.threads, [&](std::size_t row_index) {
    const int row = static_cast<int>(row_index);
    for (int col = 0; col < width; ++col) {
      const std::size_t p = static_cast<std::size_t>(row) * width + col;
      Rng ao_rng = Rng::derive(key.seed, StreamDomain::kAmbientOcclusion, stream_key, p);
      const Sample center = trace(col + 0.5, row + 0.5, want_color && !scene.supersample, ao_rng);
      if (center.hit) {
        fb.hit_triangle[p] = center.triangle;
        fb.hit_point_model[3 * p + 0] = center.model_point.x();
        fb.hit_point_model[3 * p + 1] = center.model_point.y();
        fb.hit_point_model[3 * p + 2] = center.model_point.z();
        fb.depth[p] = rotation.row(2).dot(center.model_point) + pose.translation.z();
      }
      if (!want_color) continue;
      Vec3 color;
      if (scene.supersample) {
        color = Vec3::Zero();
        for (int sy = 0; sy < 2; ++sy) {
          for (int sx = 0; sx < 2; ++sx) {
            const Sample sub = trace(col + 0.25 + 0.5 * sx, row + 0.25 + 0.5 * sy, true, ao_rng);
            color += sub.hit ? sub.color : background.at(row, col);
          }
        }
        color /= 4.0;
      } else {
        color = center.hit ? center.color : background.at(row, col);
      }
      fb.color[3 * p + 0] = color.x();
      fb.color[3 * p + 1] = color.y();
      fb.color[3 * p + 2] = color.z();
    }
  });
  return fb;
}

}  // namespace satsynth
