#pragma once

#include "satsynth/geometry.hpp"
#include "satsynth/mesh.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace satsynth {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction{0, 0, 1};
};

struct Hit {
  std::uint32_t triangle = 0;
  double t = 0.0;
  /// Barycentric weights of vertices 1 and 2; vertex 0 gets 1 - b1 - b2.
  double b1 = 0.0;
  double b2 = 0.0;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Precomputed triangle in edge form, shared by every intersection path so
/// that the BVH and the brute-force scan produce bit-identical hits.
struct TriangleEdges {
  Vec3 v0;
  Vec3 e1;
  Vec3 e2;
};

std::vector<TriangleEdges> triangle_edges(const Mesh& mesh);

/// Two-sided Moller-Trumbore test; accepts t in (t_min, t_max).
std::optional<Hit> intersect_triangle(const TriangleEdges& tri, std::uint32_t index,
                                      const Ray& ray, double t_min, double t_max);

/// Nearest hit over all triangles, ties broken by the lowest index.
std::optional<Hit> brute_force_intersect(const std::vector<TriangleEdges>& tris, const Ray& ray,
                                         double t_min = 0.0, double t_max = kInfinity);

/// Axis-aligned bounding-volume hierarchy over a mesh's triangles.
class Bvh {
 public:
  struct Node {
    Vec3 lo;
    Vec3 hi;
    /// Leaf: first index into the triangle order. Inner: left child index.
    std::uint32_t first = 0;
    /// Leaf: triangle count (> 0). Inner: 0, right child at `right`.
    std::uint32_t count = 0;
    std::uint32_t right = 0;
    bool is_leaf() const { return count > 0; }
  };

  explicit Bvh(const Mesh& mesh, std::uint32_t max_leaf_size = 4);

  /// Same result as brute_force_intersect, including the tie rule.
  std::optional<Hit> intersect(const Ray& ray, double t_min = 0.0, double t_max = kInfinity) const;
  /// True if any triangle is hit with t in (t_min, t_max).
  bool occluded(const Ray& ray, double t_min, double t_max) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  /// Triangle indices in leaf order.
  const std::vector<std::uint32_t>& order() const { return order_; }
  const std::vector<TriangleEdges>& triangles() const { return tris_; }

 private:
  std::uint32_t build(std::uint32_t begin, std::uint32_t end, const std::vector<Vec3>& lo,
                      const std::vector<Vec3>& hi, const std::vector<Vec3>& centroid,
                      std::uint32_t max_leaf_size);

  std::vector<TriangleEdges> tris_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
};

inline Bvh build_bvh(const Mesh& mesh) { return Bvh(mesh); }

}  // namespace satsynth
