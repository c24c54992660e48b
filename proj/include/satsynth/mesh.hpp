#pragma once

#include "satsynth/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace satsynth {

using Triangle = std::array<std::uint32_t, 3>;

/// Unvalidated geometry as it comes out of a parser. Indices are signed so
/// that negative or oversized references can be reported instead of wrapped.
struct RawMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::int64_t, 3>> triangles;
  /// Empty, or one entry per vertex.
  std::vector<Vec3> normals;
  /// Empty, or one entry per triangle.
  std::vector<std::uint32_t> face_material;
  /// Names referenced by face_material; index 0 is the default group.
  std::vector<std::string> material_names;
};

/// Triangle mesh in the model frame (meters). Immutable after validation.
class Mesh {
 public:
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<std::uint32_t>& face_material() const { return face_material_; }
  const std::vector<std::string>& material_names() const { return material_names_; }

  /// Length of the axis-aligned bounding box diagonal.
  double diagonal() const;

  /// Copy with every vertex moved by `offset`.
  Mesh translated(const Vec3& offset) const;

 private:
  friend Mesh validate_mesh(const RawMesh& raw);

  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3> normals_;
  std::vector<std::uint32_t> face_material_;
  std::vector<std::string> material_names_;
};

/// Checks indices, counts, and finiteness; throws kParse naming the
/// offending element. Missing normals become area-weighted vertex normals.
Mesh validate_mesh(const RawMesh& raw);

/// Area-weighted vertex normals. Vertices touched only by zero-area faces
/// (or by none) get +z.
std::vector<Vec3> area_weighted_normals(const std::vector<Vec3>& vertices,
                                        const std::vector<Triangle>& triangles);

}  // namespace satsynth
