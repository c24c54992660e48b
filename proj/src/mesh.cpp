#include "satsynth/mesh.hpp"

#include "satsynth/error.hpp"

#include <cmath>
#include <sstream>

namespace satsynth {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::kParse, what); }

}  // namespace

std::vector<Vec3> area_weighted_normals(const std::vector<Vec3>& vertices,
                                        const std::vector<Triangle>& triangles) {
  std::vector<Vec3> sums(vertices.size(), Vec3::Zero());
  for (const Triangle& t : triangles) {
    // |cross| is twice the area, so the unnormalized cross product is the
    // area-weighted face normal.
    const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    for (std::uint32_t i : t) sums[i] += n;
  }
  for (Vec3& n : sums) {
    const double len = n.norm();
    n = len > 0.0 ? Vec3(n / len) : Vec3(0, 0, 1);
  }
  return sums;
}

Mesh validate_mesh(const RawMesh& raw) {
  if (raw.triangles.empty()) parse_error("mesh has zero triangles");
  for (std::size_t i = 0; i < raw.vertices.size(); ++i) {
    if (!raw.vertices[i].allFinite()) {
      std::ostringstream msg;
      msg << "vertex " << i << " has a non-finite coordinate";
      parse_error(msg.str());
    }
  }
  const auto vertex_count = static_cast<std::int64_t>(raw.vertices.size());
  Mesh mesh;
  mesh.triangles_.reserve(raw.triangles.size());
  for (std::size_t f = 0; f < raw.triangles.size(); ++f) {
    Triangle tri{};
    for (int k = 0; k < 3; ++k) {
      const std::int64_t idx = raw.triangles[f][k];
      if (idx < 0 || idx >= vertex_count) {
        std::ostringstream msg;
        msg << "triangle " << f << ": vertex index " << idx << " out of range (vertex count "
            << vertex_count << ")";
        parse_error(msg.str());
      }
      tri[k] = static_cast<std::uint32_t>(idx);
    }
    mesh.triangles_.push_back(tri);
  }
  mesh.vertices_ = raw.vertices;

  if (raw.normals.empty()) {
    mesh.normals_ = area_weighted_normals(mesh.vertices_, mesh.triangles_);
  } else {
    if (raw.normals.size() != raw.vertices.size()) {
      std::ostringstream msg;
      msg << "normal count " << raw.normals.size() << " does not match vertex count "
          << raw.vertices.size();
      parse_error(msg.str());
    }
    mesh.normals_.reserve(raw.normals.size());
    for (std::size_t i = 0; i < raw.normals.size(); ++i) {
      const double len = raw.normals[i].norm();
      if (!std::isfinite(len) || len == 0.0) {
        std::ostringstream msg;
        msg << "normal " << i << " is zero or non-finite";
        parse_error(msg.str());
      }
      mesh.normals_.push_back(raw.normals[i] / len);
    }
  }

  mesh.material_names_ = raw.material_names.empty() ? std::vector<std::string>{"default"}
                                                     : raw.material_names;
  if (raw.face_material.empty()) {
    mesh.face_material_.assign(mesh.triangles_.size(), 0);
  } else {
    if (raw.face_material.size() != raw.triangles.size()) {
      parse_error("face material count does not match triangle count");
    }
    for (std::size_t f = 0; f < raw.face_material.size(); ++f) {
      if (raw.face_material[f] >= mesh.material_names_.size()) {
        std::ostringstream msg;
        msg << "triangle " << f << ": material index " << raw.face_material[f]
            << " out of range";
        parse_error(msg.str());
      }
    }
    mesh.face_material_ = raw.face_material;
  }
  return mesh;
}

double Mesh::diagonal() const {
  Vec3 lo = vertices_.front(), hi = vertices_.front();
  for (const Vec3& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

Mesh Mesh::translated(const Vec3& offset) const {
  Mesh out = *this;
  for (Vec3& v : out.vertices_) v += offset;
  return out;
}

}  // namespace satsynth
