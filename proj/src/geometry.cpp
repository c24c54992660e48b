#include "satsynth/geometry.hpp"

#include "satsynth/error.hpp"

#include <cmath>
#include <sstream>

namespace satsynth {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kParse: return "parse-error";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kBehindCamera: return "behind-camera";
    case ErrorCode::kNonConvergent: return "non-convergent";
    case ErrorCode::kInsufficientCorrespondences: return "insufficient-correspondences";
    case ErrorCode::kDegenerateConfiguration: return "degenerate-configuration";
    case ErrorCode::kNoConsensus: return "no-consensus";
    case ErrorCode::kConfig: return "config-error";
    case ErrorCode::kMissingFrames: return "missing-frames";
  }
  return "unknown";
}

namespace {

double norm4(double x, double y, double z, double w) {
  return std::sqrt(x * x + y * y + z * z + w * w);
}

bool all_finite(double x, double y, double z, double w) {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) && std::isfinite(w);
}

// Quaternions within this distance of unit norm are kept as-is; dividing by
// the computed norm would only perturb the last bits.
constexpr double kMachineUnit = 1e-14;

}  // namespace

Quaternion Quaternion::from_components(double x, double y, double z, double w, double tolerance) {
  if (!all_finite(x, y, z, w)) {
    throw Error(ErrorCode::kInvalidArgument, "quaternion has non-finite components");
  }
  const double n = norm4(x, y, z, w);
  if (std::abs(n - 1.0) > tolerance) {
    std::ostringstream msg;
    msg << "quaternion norm outside tolerance (|q| = " << n << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  if (std::abs(n - 1.0) <= kMachineUnit) return Quaternion(x, y, z, w);
  return Quaternion(x / n, y / n, z / n, w / n);
}

Quaternion Quaternion::normalized(double x, double y, double z, double w) {
  if (!all_finite(x, y, z, w)) {
    throw Error(ErrorCode::kInvalidArgument, "quaternion has non-finite components");
  }
  const double n = norm4(x, y, z, w);
  if (n == 0.0) throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero quaternion");
  return Quaternion(x / n, y / n, z / n, w / n);
}

Quaternion Quaternion::from_matrix(const Mat3& r) {
  // Shepperd's method: pivot on the largest of the four squared components.
  const double trace = r.trace();
  double x, y, z, w;
  if (trace >= r(0, 0) && trace >= r(1, 1) && trace >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    w = 0.25 * s;
    x = (r(2, 1) - r(1, 2)) / s;
    y = (r(0, 2) - r(2, 0)) / s;
    z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    w = (r(2, 1) - r(1, 2)) / s;
    x = 0.25 * s;
    y = (r(0, 1) + r(1, 0)) / s;
    z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2));
    w = (r(0, 2) - r(2, 0)) / s;
    x = (r(0, 1) + r(1, 0)) / s;
    y = 0.25 * s;
    z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1));
    w = (r(1, 0) - r(0, 1)) / s;
    x = (r(0, 2) + r(2, 0)) / s;
    y = (r(1, 2) + r(2, 1)) / s;
    z = 0.25 * s;
  }
  if (w < 0) {
    x = -x;
    y = -y;
    z = -z;
    w = -w;
  }
  return normalized(x, y, z, w);
}

Quaternion Quaternion::operator*(const Quaternion& b) const {
  const Quaternion& a = *this;
  return normalized(a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_,
                    a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_,
                    a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_,
                    a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_);
}

Mat3 Quaternion::to_matrix() const { return quat_to_matrix(xyzw()); }

Mat3 quat_to_matrix(const std::array<double, 4>& q) {
  const auto [x, y, z, w] = q;
  if (!all_finite(x, y, z, w) || std::abs(norm4(x, y, z, w) - 1.0) > Quaternion::kUnitTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "quat_to_matrix requires a unit quaternion");
  }
  const double xx = x * x, yy = y * y, zz = z * z;
  const double xy = x * y, xz = x * z, yz = y * z;
  const double wx = w * x, wy = w * y, wz = w * z;
  Mat3 r;
  r << 1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz), 2.0 * (xz + wy),
      2.0 * (xy + wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx),
      2.0 * (xz - wy), 2.0 * (yz + wx), 1.0 - 2.0 * (xx + yy);
  return r;
}

void require_renderable(const Pose& pose) {
  if (!pose.translation.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "pose translation is not finite");
  }
  if (!(pose.translation.z() > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "pose translation.z must be > 0 for rendering");
  }
}

}  // namespace satsynth
