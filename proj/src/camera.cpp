#include "satsynth/camera.hpp"

#include "satsynth/error.hpp"

#include <cmath>
#include <sstream>

namespace satsynth {

namespace {

double radial_factor(const Distortion& d, double r2) {
  return 1.0 + r2 * (d.k1 + r2 * (d.k2 + r2 * d.k3));
}

Vec2 tangential(const Distortion& d, double x, double y, double r2) {
  return {2.0 * d.p1 * x * y + d.p2 * (r2 + 2.0 * x * x),
          d.p1 * (r2 + 2.0 * y * y) + 2.0 * d.p2 * x * y};
}

// A converged inverse must stay within this residual for the camera to be
// accepted.
constexpr double kCameraResidual = 1e-8;

}  // namespace

Vec2 distort(const Distortion& d, const Vec2& p) {
  const double x = p.x(), y = p.y();
  const double r2 = x * x + y * y;
  const double radial = radial_factor(d, r2);
  return Vec2(x * radial, y * radial) + tangential(d, x, y, r2);
}

UndistortResult undistort(const Distortion& d, const Vec2& distorted, int max_iterations,
                          double tolerance) {
  UndistortResult result;
  result.point = distorted;
  if (d.is_zero()) {
    result.converged = true;
    return result;
  }
  Vec2 x = distorted;
  double residual = (distort(d, x) - distorted).norm();
  int it = 0;
  while (residual >= tolerance && it < max_iterations) {
    const double r2 = x.squaredNorm();
    const double radial = radial_factor(d, r2);
    if (!std::isfinite(radial) || radial == 0.0) break;
    x = (distorted - tangential(d, x.x(), x.y(), r2)) / radial;
    residual = (distort(d, x) - distorted).norm();
    ++it;
  }
  result.point = x;
  result.residual = residual;
  result.iterations = it;
  result.converged = std::isfinite(residual) && residual < tolerance;
  return result;
}

CameraModel::CameraModel(int width, int height, double fx, double fy, double cx, double cy,
                         Distortion distortion)
    : width_(width), height_(height), fx_(fx), fy_(fy), cx_(cx), cy_(cy), distortion_(distortion) {
  std::ostringstream msg;
  if (width < 16 || height < 16) {
    msg << "camera resolution must be at least 16x16, got " << width << "x" << height;
  } else if (!(fx > 0) || !(fy > 0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    msg << "focal lengths must be positive and finite";
  } else if (!(cx >= 0 && cx < width) || !(cy >= 0 && cy < height)) {
    msg << "principal point (" << cx << ", " << cy << ") outside the image";
  } else if (!std::isfinite(distortion.k1) || !std::isfinite(distortion.k2) ||
             !std::isfinite(distortion.k3) || !std::isfinite(distortion.p1) ||
             !std::isfinite(distortion.p2)) {
    msg << "distortion coefficients must be finite";
  }
  if (!msg.str().empty()) throw Error(ErrorCode::kInvalidArgument, msg.str());

  if (distortion.is_zero()) return;
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const Vec2 xd((col + 0.5 - cx) / fx, (row + 0.5 - cy) / fy);
      const UndistortResult r = undistort(distortion, xd, 20, 1e-10);
      if (!(r.residual < kCameraResidual)) {
        std::ostringstream err;
        err << "lens distortion cannot be inverted at pixel (" << col << ", " << row
            << "), residual " << r.residual;
        throw Error(ErrorCode::kNonConvergent, err.str());
      }
    }
  }
}

Vec2 CameraModel::pixel_to_normalized(double u, double v) const {
  const Vec2 xd((u - cx_) / fx_, (v - cy_) / fy_);
  const UndistortResult r = undistort(distortion_, xd);
  if (!r.converged) {
    std::ostringstream msg;
    msg << "distortion inversion did not converge at pixel (" << u << ", " << v << ")";
    throw Error(ErrorCode::kNonConvergent, msg.str());
  }
  return r.point;
}

Vec2 CameraModel::normalized_to_pixel(const Vec2& normalized) const {
  const Vec2 xd = distort(distortion_, normalized);
  return {fx_ * xd.x() + cx_, fy_ * xd.y() + cy_};
}

Vec2 CameraModel::undistort_pixel(double u, double v) const {
  const Vec2 n = pixel_to_normalized(u, v);
  return {fx_ * n.x() + cx_, fy_ * n.y() + cy_};
}

}  // namespace satsynth
