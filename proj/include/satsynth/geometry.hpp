#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>

namespace satsynth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion stored in scalar-last order {x, y, z, w}.
///
/// Construction always yields |q| = 1 within 1e-9. q and -q are distinct
/// values but the same rotation; everything that consumes a rotation is
/// sign-invariant.
class Quaternion {
 public:
  static constexpr double kUnitTolerance = 1e-6;

  /// Identity rotation.
  Quaternion() = default;

  /// Accepts components whose norm is within `tolerance` of 1 and
  /// renormalizes them. Components already unit to machine precision are
  /// kept bit-for-bit. Throws kInvalidArgument otherwise.
  static Quaternion from_components(double x, double y, double z, double w,
                                    double tolerance = kUnitTolerance);

  /// Normalizes any finite non-zero 4-vector.
  static Quaternion normalized(double x, double y, double z, double w);

  static Quaternion from_matrix(const Mat3& rotation);

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  double w() const { return w_; }
  std::array<double, 4> xyzw() const { return {x_, y_, z_, w_}; }

  Quaternion operator-() const { return Quaternion(-x_, -y_, -z_, -w_); }
  /// Hamilton product; (a * b) applies b first.
  Quaternion operator*(const Quaternion& rhs) const;
  Quaternion conjugate() const { return Quaternion(-x_, -y_, -z_, w_); }

  double dot(const Quaternion& rhs) const {
    return x_ * rhs.x_ + y_ * rhs.y_ + z_ * rhs.z_ + w_ * rhs.w_;
  }

  Mat3 to_matrix() const;

  bool operator==(const Quaternion&) const = default;

 private:
  Quaternion(double x, double y, double z, double w) : x_(x), y_(y), z_(z), w_(w) {}

  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
  double w_ = 1.0;
};

/// Rotation matrix of a raw {x, y, z, w} quaternion. Throws kInvalidArgument
/// if the norm differs from 1 by more than 1e-6. Products are formed pairwise
/// so the result is bit-identical for q and -q.
Mat3 quat_to_matrix(const std::array<double, 4>& xyzw);

/// Rigid transform model frame -> camera frame: X_cam = R * X_model + t.
struct Pose {
  Quaternion rotation;
  Vec3 translation = Vec3::Zero();

  Vec3 transform(const Vec3& model_point) const {
    return rotation.to_matrix() * model_point + translation;
  }

  bool operator==(const Pose& rhs) const {
    return rotation == rhs.rotation && translation == rhs.translation;
  }
};

/// Throws kInvalidArgument unless translation.z > 0 and all values finite.
void require_renderable(const Pose& pose);

}  // namespace satsynth
