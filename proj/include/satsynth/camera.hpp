#pragma once

#include "satsynth/geometry.hpp"

namespace satsynth {

/// Brown-Conrady coefficients (OpenCV ordering).
struct Distortion {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  bool is_zero() const { return k1 == 0 && k2 == 0 && k3 == 0 && p1 == 0 && p2 == 0; }
  bool operator==(const Distortion&) const = default;
};

/// Maps undistorted normalized image coordinates to distorted ones.
Vec2 distort(const Distortion& d, const Vec2& undistorted);

struct UndistortResult {
  Vec2 point;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Fixed-point inversion of `distort`: x <- (x_d - tangential(x)) / radial(x).
/// Stops once |distort(x) - x_d| < tolerance or after max_iterations.
UndistortResult undistort(const Distortion& d, const Vec2& distorted, int max_iterations = 20,
                          double tolerance = 1e-10);

/// Pinhole intrinsics plus lens distortion. Pixel (u, v) = (column, row),
/// origin at the top-left pixel corner, pixel centers at half-integers.
class CameraModel {
 public:
  /// Throws kInvalidArgument on invalid intrinsics and kNonConvergent when
  /// the distortion cannot be inverted at some pixel center.
  CameraModel(int width, int height, double fx, double fy, double cx, double cy,
              Distortion distortion = {});

  int width() const { return width_; }
  int height() const { return height_; }
  double fx() const { return fx_; }
  double fy() const { return fy_; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }
  const Distortion& distortion() const { return distortion_; }

  /// Pixel -> undistorted normalized coordinates. Throws kNonConvergent.
  Vec2 pixel_to_normalized(double u, double v) const;
  /// Undistorted normalized coordinates -> distorted pixel.
  Vec2 normalized_to_pixel(const Vec2& normalized) const;
  /// Distorted pixel -> the pixel an ideal pinhole camera would observe.
  Vec2 undistort_pixel(double u, double v) const;

  bool in_bounds(double u, double v) const {
    return u >= 0.0 && v >= 0.0 && u < width_ && v < height_;
  }

  bool operator==(const CameraModel&) const = default;

 private:
  int width_;
  int height_;
  double fx_;
  double fy_;
  double cx_;
  double cy_;
  Distortion distortion_;
};

}  // namespace satsynth
