#include "satsynth/camera.hpp"
#include "satsynth/geometry.hpp"
#include "satsynth/mesh.hpp"
#include "satsynth/rng.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace satsynth;
using satsynth::test::error_message;

TEST(Quaternion, IdentityMapsToIdentityMatrix) {
  EXPECT_EQ(quat_to_matrix({0, 0, 0, 1}), Mat3::Identity());
  EXPECT_EQ(Quaternion().to_matrix(), Mat3::Identity());
}

TEST(Quaternion, QuarterTurnAboutZ) {
  const double h = std::sqrt(0.5);
  const Vec3 r = quat_to_matrix({0, 0, h, h}) * Vec3(1, 0, 0);
  EXPECT_NEAR(r.x(), 0.0, 1e-15);
  EXPECT_NEAR(r.y(), 1.0, 1e-15);
  EXPECT_NEAR(r.z(), 0.0, 1e-15);
}

TEST(Quaternion, RandomMatricesAreOrthonormalAndSignInvariant) {
  std::mt19937_64 gen(1);
  for (int i = 0; i < 1000; ++i) {
    const Quaternion q = test::random_rotation(gen);
    const Mat3 r = q.to_matrix();
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-9);
    EXPECT_EQ(r, (-q).to_matrix());
    EXPECT_EQ(quat_to_matrix(q.xyzw()), quat_to_matrix((-q).xyzw()));
  }
}

TEST(Quaternion, RejectsNonUnit) {
  EXPECT_ERROR_CODE(quat_to_matrix({0, 0, 0, 1.01}), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(Quaternion::from_components(0, 0, 0, 0.5), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(Quaternion::from_components(0, 0, NAN, 1), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(Quaternion::normalized(0, 0, 0, 0), ErrorCode::kInvalidArgument);
  EXPECT_NO_THROW(quat_to_matrix({0, 0, 0, 1 + 5e-7}));
}

TEST(Quaternion, ConstructionIsUnitWithinTolerance) {
  const Quaternion q = Quaternion::from_components(0.1, 0.2, 0.3, 0.9274, 1e-3);
  const double n = std::sqrt(q.dot(q));
  EXPECT_NEAR(n, 1.0, 1e-9);
}

TEST(Quaternion, HamiltonProductComposesRotations) {
  std::mt19937_64 gen(2);
  const Quaternion a = test::random_rotation(gen), b = test::random_rotation(gen);
  const Mat3 expected = a.to_matrix() * b.to_matrix();
  EXPECT_LT(((a * b).to_matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quaternion, FromMatrixRoundTrip) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 200; ++i) {
    const Quaternion q = test::random_rotation(gen);
    const Quaternion back = Quaternion::from_matrix(q.to_matrix());
    EXPECT_NEAR(std::abs(back.dot(q)), 1.0, 1e-12);
  }
}

TEST(Pose, RenderableRequiresPositiveZ) {
  Pose p;
  p.translation = {0, 0, 1};
  EXPECT_NO_THROW(require_renderable(p));
  p.translation.z() = 0;
  EXPECT_ERROR_CODE(require_renderable(p), ErrorCode::kInvalidArgument);
  p.translation = {NAN, 0, 1};
  EXPECT_ERROR_CODE(require_renderable(p), ErrorCode::kInvalidArgument);
}

TEST(Camera, RejectsInvalidIntrinsics) {
  EXPECT_ERROR_CODE(CameraModel(15, 64, 100, 100, 8, 32), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(CameraModel(64, 64, 0, 100, 32, 32), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(CameraModel(64, 64, 100, 100, 64, 32), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(CameraModel(64, 64, 100, 100, 32, -1), ErrorCode::kInvalidArgument);
}

TEST(Camera, PathologicalDistortionIsNonConvergent) {
  Distortion d;
  d.k1 = -2.0;
  d.k2 = 5.0;
  const std::string msg = error_message([&] { CameraModel(64, 64, 20, 20, 32, 32, d); });
  EXPECT_NE(msg.find("pixel"), std::string::npos) << msg;
  EXPECT_ERROR_CODE(CameraModel(64, 64, 20, 20, 32, 32, d), ErrorCode::kNonConvergent);
}

// Independent Brown-Conrady forward model.
Vec2 brown_conrady(const Distortion& d, const Vec2& p) {
  const double x = p.x(), y = p.y(), r2 = x * x + y * y;
  const double radial = 1 + d.k1 * r2 + d.k2 * r2 * r2 + d.k3 * r2 * r2 * r2;
  return {x * radial + 2 * d.p1 * x * y + d.p2 * (r2 + 2 * x * x),
          y * radial + d.p1 * (r2 + 2 * y * y) + 2 * d.p2 * x * y};
}

TEST(Camera, DistortMatchesIndependentFormula) {
  Distortion d{-0.1, 0.02, -0.003, 0.001, -0.002};
  for (double x = -0.6; x <= 0.6; x += 0.1) {
    for (double y = -0.6; y <= 0.6; y += 0.1) {
      const Vec2 a = distort(d, {x, y}), b = brown_conrady(d, {x, y});
      EXPECT_NEAR(a.x(), b.x(), 1e-15);
      EXPECT_NEAR(a.y(), b.y(), 1e-15);
    }
  }
}

TEST(Camera, UndistortInvertsDistortOverPixelGrid) {
  Distortion d;
  d.k1 = -0.1;
  const CameraModel cam(512, 512, 400, 400, 256, 256, d);
  for (int i = 0; i < 17; ++i) {
    for (int j = 0; j < 17; ++j) {
      const double u = 0.5 + i * 511.0 / 16.0, v = 0.5 + j * 511.0 / 16.0;
      const Vec2 xd((u - 256) / 400, (v - 256) / 400);
      const UndistortResult r = undistort(d, xd);
      ASSERT_TRUE(r.converged);
      EXPECT_LE(r.iterations, 20);
      EXPECT_LT((brown_conrady(d, r.point) - xd).norm(), 1e-8);
      const Vec2 px = cam.normalized_to_pixel(cam.pixel_to_normalized(u, v));
      EXPECT_NEAR(px.x(), u, 1e-6);
      EXPECT_NEAR(px.y(), v, 1e-6);
    }
  }
}

TEST(Camera, UndistortPixelWithoutDistortionIsIdentity) {
  const CameraModel cam(64, 48, 50, 60, 30, 20);
  const Vec2 p = cam.undistort_pixel(12.25, 40.5);
  EXPECT_EQ(p, Vec2(12.25, 40.5));
  EXPECT_TRUE(cam.in_bounds(0, 0));
  EXPECT_FALSE(cam.in_bounds(64, 10));
  EXPECT_FALSE(cam.in_bounds(10, -0.1));
}

TEST(Mesh, CubeValidates) {
  const Mesh m = test::unit_cube();
  EXPECT_EQ(m.vertices().size(), 8u);
  EXPECT_EQ(m.triangles().size(), 12u);
  ASSERT_EQ(m.normals().size(), 8u);
  for (const Vec3& n : m.normals()) {
    EXPECT_NEAR(n.norm(), 1.0, 1e-6);
  }
  // Corner normals point diagonally outward.
  EXPECT_NEAR(m.normals()[7].dot(Vec3(1, 1, 1).normalized()), 1.0, 1e-12);
  EXPECT_NEAR(m.diagonal(), std::sqrt(3.0), 1e-15);
}

TEST(Mesh, OutOfRangeIndexNamesTriangle) {
  RawMesh raw;
  raw.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  raw.triangles = {{0, 1, 2}, {0, 1, 3}};
  const std::string msg = error_message([&] { validate_mesh(raw); });
  EXPECT_NE(msg.find("out of range"), std::string::npos) << msg;
  EXPECT_NE(msg.find("triangle 1"), std::string::npos) << msg;
  EXPECT_ERROR_CODE(validate_mesh(raw), ErrorCode::kParse);
  raw.triangles = {{0, -1, 2}};
  EXPECT_ERROR_CODE(validate_mesh(raw), ErrorCode::kParse);
}

TEST(Mesh, RejectsEmptyAndNonFinite) {
  RawMesh raw;
  raw.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  EXPECT_ERROR_CODE(validate_mesh(raw), ErrorCode::kParse);
  raw.triangles = {{0, 1, 2}};
  raw.vertices[1].y() = INFINITY;
  const std::string msg = error_message([&] { validate_mesh(raw); });
  EXPECT_NE(msg.find("vertex 1"), std::string::npos) << msg;
}

TEST(Mesh, RejectsNormalCountMismatch) {
  RawMesh raw;
  raw.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  raw.triangles = {{0, 1, 2}};
  raw.normals = {{0, 0, 1}};
  EXPECT_ERROR_CODE(validate_mesh(raw), ErrorCode::kParse);
}

TEST(Mesh, DegenerateTriangleTakesNormalFromNeighbours) {
  RawMesh raw;
  raw.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0, 0}};
  raw.triangles = {{0, 1, 2}, {0, 2, 3}, {0, 4, 1}};  // last one has zero area
  const Mesh m = validate_mesh(raw);
  EXPECT_EQ(m.triangles().size(), 3u);
  // Oracle: sum raw cross products of adjacent faces, normalize.
  for (std::size_t i = 0; i < raw.vertices.size(); ++i) {
    Vec3 sum = Vec3::Zero();
    for (const auto& t : raw.triangles) {
      if (t[0] != static_cast<std::int64_t>(i) && t[1] != static_cast<std::int64_t>(i) &&
          t[2] != static_cast<std::int64_t>(i)) {
        continue;
      }
      sum += (raw.vertices[t[1]] - raw.vertices[t[0]]).cross(raw.vertices[t[2]] - raw.vertices[t[0]]);
    }
    const Vec3 expected = sum.norm() > 0 ? Vec3(sum.normalized()) : Vec3(0, 0, 1);
    EXPECT_LT((m.normals()[i] - expected).norm(), 1e-12) << "vertex " << i;
  }
  // Vertex 4 touches only the degenerate face.
  EXPECT_EQ(m.normals()[4], Vec3(0, 0, 1));
  EXPECT_NEAR(m.normals()[0].z(), 1.0, 1e-12);
}

TEST(Mesh, TranslatedMovesVertices) {
  const Mesh m = test::unit_cube();
  const Mesh t = m.translated({1, 2, 3});
  for (std::size_t i = 0; i < m.vertices().size(); ++i) {
    EXPECT_EQ(t.vertices()[i], m.vertices()[i] + Vec3(1, 2, 3));
  }
  EXPECT_EQ(t.triangles(), m.triangles());
  EXPECT_EQ(t.normals(), m.normals());
}

TEST(Rng, PhiloxKnownAnswers) {
  using B = std::array<std::uint32_t, 4>;
  EXPECT_EQ(Rng::block({0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Rng::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Rng::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, StreamsAreDeterministicAndIndependent) {
  Rng a = Rng::derive(42, StreamDomain::kPose, 3);
  Rng b = Rng::derive(42, StreamDomain::kPose, 3);
  Rng c = Rng::derive(42, StreamDomain::kPose, 4);
  Rng d = Rng::derive(42, StreamDomain::kNoise, 3);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    same_c += x == c.next_u64();
    same_d += x == d.next_u64();
  }
  EXPECT_EQ(same_c, 0);
  EXPECT_EQ(same_d, 0);
}

TEST(Rng, UniformAndNormalMoments) {
  Rng rng(7, 0);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.01);
}

TEST(Rng, BelowIsInRangeAndCoversAll) {
  Rng rng(9, 1);
  int counts[7] = {};
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_GT(c, 850);
}
