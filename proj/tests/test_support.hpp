#pragma once

#include "satsynth/error.hpp"
#include "satsynth/geometry.hpp"
#include "satsynth/mesh.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace satsynth::test {

#define EXPECT_ERROR_CODE(stmt, expected_code)                                   \
  do {                                                                           \
    try {                                                                        \
      stmt;                                                                      \
      ADD_FAILURE() << "expected satsynth::Error from: " #stmt;                  \
    } catch (const ::satsynth::Error& e_) {                                      \
      EXPECT_EQ(e_.code(), expected_code) << e_.what();                          \
    }                                                                            \
  } while (0)

// Error message of `fn`, or "" if it does not throw.
template <typename Fn>
std::string error_message(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

inline std::string source_dir() { return SATSYNTH_SOURCE_DIR; }

// Fresh directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name) {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    std::string stem = name;
    if (info) stem += std::string("_") + info->test_suite_name() + "_" + info->name();
    path_ = std::filesystem::temp_directory_path() / ("satsynth_test_" + stem);
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Mesh unit_cube(double half = 0.5) {
  RawMesh raw;
  for (int i = 0; i < 8; ++i) {
    raw.vertices.emplace_back((i & 1) ? half : -half, (i & 2) ? half : -half,
                              (i & 4) ? half : -half);
  }
  // Outward-facing windings.
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    raw.triangles.push_back({q[0], q[1], q[2]});
    raw.triangles.push_back({q[0], q[2], q[3]});
  }
  return validate_mesh(raw);
}

// Square plate in the z = 0 plane, facing -z (towards a camera looking down +z).
inline Mesh plate(double half) {
  RawMesh raw;
  raw.vertices = {{-half, -half, 0}, {half, -half, 0}, {half, half, 0}, {-half, half, 0}};
  raw.triangles = {{0, 2, 1}, {0, 3, 2}};
  return validate_mesh(raw);
}

// Quad a-b-c-d with its own four vertices and flat normal `n`.
inline void append_quad(RawMesh& raw, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                        std::uint32_t material = 0) {
  const auto base = static_cast<std::int64_t>(raw.vertices.size());
  const Vec3 n = (b - a).cross(c - a).normalized();
  for (const Vec3& v : {a, b, c, d}) {
    raw.vertices.push_back(v);
    raw.normals.push_back(n);
  }
  raw.triangles.push_back({base, base + 1, base + 2});
  raw.triangles.push_back({base, base + 2, base + 3});
  if (material != 0 || !raw.face_material.empty()) {
    raw.face_material.resize(raw.triangles.size() - 2, 0);
    raw.face_material.push_back(material);
    raw.face_material.push_back(material);
  }
}

// Axis-aligned box with flat per-face normals pointing outward.
inline void append_box(RawMesh& raw, const Vec3& lo, const Vec3& hi) {
  const Vec3 p[8] = {{lo.x(), lo.y(), lo.z()}, {hi.x(), lo.y(), lo.z()}, {lo.x(), hi.y(), lo.z()},
                     {hi.x(), hi.y(), lo.z()}, {lo.x(), lo.y(), hi.z()}, {hi.x(), lo.y(), hi.z()},
                     {lo.x(), hi.y(), hi.z()}, {hi.x(), hi.y(), hi.z()}};
  append_quad(raw, p[0], p[2], p[3], p[1]);
  append_quad(raw, p[4], p[5], p[7], p[6]);
  append_quad(raw, p[0], p[1], p[5], p[4]);
  append_quad(raw, p[2], p[6], p[7], p[3]);
  append_quad(raw, p[0], p[4], p[6], p[2]);
  append_quad(raw, p[1], p[3], p[7], p[5]);
}

inline Quaternion random_rotation(std::mt19937_64& gen) {
  std::normal_distribution<double> n;
  return Quaternion::normalized(n(gen), n(gen), n(gen), n(gen));
}

}  // namespace satsynth::test
