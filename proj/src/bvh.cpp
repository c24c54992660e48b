#include "satsynth/bvh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace satsynth {

std::vector<TriangleEdges> triangle_edges(const Mesh& mesh) {
  std::vector<TriangleEdges> out;
  out.reserve(mesh.triangles().size());
  const auto& v = mesh.vertices();
  for (const Triangle& t : mesh.triangles()) {
    out.push_back({v[t[0]], v[t[1]] - v[t[0]], v[t[2]] - v[t[0]]});
  }
  return out;
}

std::optional<Hit> intersect_triangle(const TriangleEdges& tri, std::uint32_t index,
                                      const Ray& ray, double t_min, double t_max) {
  const Vec3 pvec = ray.direction.cross(tri.e2);
  const double det = tri.e1.dot(pvec);
  if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 tvec = ray.origin - tri.v0;
  const double b1 = tvec.dot(pvec) * inv_det;
  if (b1 < 0.0 || b1 > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(tri.e1);
  const double b2 = ray.direction.dot(qvec) * inv_det;
  if (b2 < 0.0 || b1 + b2 > 1.0) return std::nullopt;
  const double t = tri.e2.dot(qvec) * inv_det;
  if (!(t > t_min && t < t_max)) return std::nullopt;
  return Hit{index, t, b1, b2};
}

namespace {

inline bool closer(const Hit& candidate, const std::optional<Hit>& best) {
  return !best || candidate.t < best->t ||
         (candidate.t == best->t && candidate.triangle < best->triangle);
}

struct RaySlabs {
  std::array<double, 3> origin;
  std::array<double, 3> inv;
  std::array<bool, 3> parallel;
};

RaySlabs slabs_for(const Ray& ray) {
  RaySlabs s;
  for (int k = 0; k < 3; ++k) {
    s.origin[k] = ray.origin[k];
    s.parallel[k] = ray.direction[k] == 0.0;
    s.inv[k] = s.parallel[k] ? 0.0 : 1.0 / ray.direction[k];
  }
  return s;
}

// Returns the entry distance, or +inf when the box is missed within
// [t_min, t_max].
inline double box_entry(const RaySlabs& s, const Vec3& lo, const Vec3& hi, double t_min,
                        double t_max) {
  double t0 = t_min, t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    if (s.parallel[k]) {
      if (s.origin[k] < lo[k] || s.origin[k] > hi[k]) return kInfinity;
      continue;
    }
    double a = (lo[k] - s.origin[k]) * s.inv[k];
    double b = (hi[k] - s.origin[k]) * s.inv[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
    if (t0 > t1) return kInfinity;
  }
  return t0;
}

// Boxes are inflated so that rounding in the slab test can never reject a
// ray that the triangle test would accept.
Vec3 padding_for(const Vec3& lo, const Vec3& hi) {
  const double scale = std::max(lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff());
  return Vec3::Constant(1e-9 + 1e-7 * scale);
}

}  // namespace

std::optional<Hit> brute_force_intersect(const std::vector<TriangleEdges>& tris, const Ray& ray,
                                         double t_min, double t_max) {
  std::optional<Hit> best;
  for (std::uint32_t i = 0; i < tris.size(); ++i) {
    const auto hit = intersect_triangle(tris[i], i, ray, t_min, t_max);
    if (hit && closer(*hit, best)) best = hit;
  }
  return best;
}

Bvh::Bvh(const Mesh& mesh, std::uint32_t max_leaf_size) : tris_(triangle_edges(mesh)) {
  const std::size_t n = tris_.size();
  std::vector<Vec3> lo(n), hi(n), centroid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const TriangleEdges& t = tris_[i];
    const Vec3 a = t.v0, b = t.v0 + t.e1, c = t.v0 + t.e2;
    lo[i] = a.cwiseMin(b).cwiseMin(c);
    hi[i] = a.cwiseMax(b).cwiseMax(c);
    const Vec3 pad = padding_for(lo[i], hi[i]);
    lo[i] -= pad;
    hi[i] += pad;
    centroid[i] = (a + b + c) / 3.0;
  }
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(2 * n);
  build(0, static_cast<std::uint32_t>(n), lo, hi, centroid, std::max(1u, max_leaf_size));
}

std::uint32_t Bvh::build(std::uint32_t begin, std::uint32_t end, const std::vector<Vec3>& lo,
                         const std::vector<Vec3>& hi, const std::vector<Vec3>& centroid,
                         std::uint32_t max_leaf_size) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Vec3 box_lo = Vec3::Constant(kInfinity), box_hi = Vec3::Constant(-kInfinity);
  Vec3 c_lo = box_lo, c_hi = box_hi;
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t t = order_[i];
    box_lo = box_lo.cwiseMin(lo[t]);
    box_hi = box_hi.cwiseMax(hi[t]);
    c_lo = c_lo.cwiseMin(centroid[t]);
    c_hi = c_hi.cwiseMax(centroid[t]);
  }
  nodes_[index].lo = box_lo;
  nodes_[index].hi = box_hi;

  const Vec3 extent = c_hi - c_lo;
  int axis = 0;
  if (extent.y() > extent[axis]) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;
  if (end - begin <= max_leaf_size || extent[axis] <= 0.0) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }

  // Median split on centroids; ties ordered by triangle index so the tree
  // shape only depends on the mesh.
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return centroid[a][axis] < centroid[b][axis] ||
                            (centroid[a][axis] == centroid[b][axis] && a < b);
                   });
  const std::uint32_t left = build(begin, mid, lo, hi, centroid, max_leaf_size);
  const std::uint32_t right = build(mid, end, lo, hi, centroid, max_leaf_size);
  nodes_[index].first = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

std::optional<Hit> Bvh::intersect(const Ray& ray, double t_min, double t_max) const {
  std::optional<Hit> best;
  if (nodes_.empty()) return best;
  const RaySlabs slabs = slabs_for(ray);
  std::array<std::uint32_t, 64> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    const double limit = best ? best->t : t_max;
    // Boxes entered exactly at the current best distance may still hold a
    // lower-index tie, so only strictly farther boxes are pruned.
    const double entry = box_entry(slabs, node.lo, node.hi, t_min, t_max);
    if (entry == kInfinity || entry > limit) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t tri = order_[i];
        const auto hit = intersect_triangle(tris_[tri], tri, ray, t_min, t_max);
        if (hit && closer(*hit, best)) best = hit;
      }
      continue;
    }
    const Node& l = nodes_[node.first];
    const Node& r = nodes_[node.right];
    const double tl = box_entry(slabs, l.lo, l.hi, t_min, t_max);
    const double tr = box_entry(slabs, r.lo, r.hi, t_min, t_max);
    // Push the farther child first so the nearer one is visited next.
    if (tl <= tr) {
      if (tr != kInfinity) stack[top++] = node.right;
      if (tl != kInfinity) stack[top++] = node.first;
    } else {
      if (tl != kInfinity) stack[top++] = node.first;
      if (tr != kInfinity) stack[top++] = node.right;
    }
  }
  return best;
}

bool Bvh::occluded(const Ray& ray, double t_min, double t_max) const {
  if (nodes_.empty()) return false;
  const RaySlabs slabs = slabs_for(ray);
  std::array<std::uint32_t, 64> stack;
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_entry(slabs, node.lo, node.hi, t_min, t_max) == kInfinity) continue;
    if (node.is_leaf()) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        if (intersect_triangle(tris_[order_[i]], order_[i], ray, t_min, t_max)) return true;
      }
      continue;
    }
    stack[top++] = node.right;
    stack[top++] = node.first;
  }
  return false;
}

}  // namespace satsynth
