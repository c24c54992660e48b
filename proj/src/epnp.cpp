#include "satsynth/error.hpp"
#include "satsynth/pose_eval.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace satsynth {

namespace {

using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

struct Problem {
  int k = 4;                       // control points
  std::vector<Vec3> control;       // model frame
  MatX alphas;                     // n x k
  std::vector<Vec2> xn;            // normalized observations
  std::vector<Vec3> points;
  std::vector<std::pair<int, int>> pairs;
  VecX rho;                        // squared control-point distances
};

struct Candidate {
  Mat3 rotation;
  Vec3 translation;
  double error = std::numeric_limits<double>::infinity();
};

Problem setup(std::span<const Correspondence> corr, const CameraModel& camera) {
  Problem pb;
  const int n = static_cast<int>(corr.size());
  Vec3 centroid = Vec3::Zero();
  for (const Correspondence& c : corr) {
    if (!c.point.allFinite() || !c.pixel.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "epnp: non-finite correspondence");
    }
    centroid += c.point;
    pb.points.push_back(c.point);
    pb.xn.emplace_back((c.pixel.x() - camera.cx()) / camera.fx(),
                       (c.pixel.y() - camera.cy()) / camera.fy());
  }
  centroid /= n;

  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pb.points) cov += (p - centroid) * (p - centroid).transpose();
  cov /= n;
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 lambda = eig.eigenvalues();  // ascending
  const Mat3 axes = eig.eigenvectors();
  if (!(lambda(2) > 0.0) || lambda(1) < 1e-8 * lambda(2)) {
    throw Error(ErrorCode::kDegenerateConfiguration, "epnp: points are collinear or coincident");
  }
  const bool planar = lambda(0) < 1e-8 * lambda(2);
  pb.k = planar ? 3 : 4;

  // Control points: centroid plus the principal axes scaled by their spread.
  std::vector<int> axis_order = planar ? std::vector<int>{2, 1} : std::vector<int>{2, 1, 0};
  pb.control.push_back(centroid);
  for (int a : axis_order) pb.control.push_back(centroid + std::sqrt(lambda(a)) * axes.col(a));

  pb.alphas.resize(n, pb.k);
  for (int i = 0; i < n; ++i) {
    const Vec3 d = pb.points[i] - centroid;
    double rest = 1.0;
    for (int j = 1; j < pb.k; ++j) {
      const int a = axis_order[j - 1];
      const double alpha = d.dot(axes.col(a)) / std::sqrt(lambda(a));
      pb.alphas(i, j) = alpha;
      rest -= alpha;
    }
    pb.alphas(i, 0) = rest;
  }

  for (int a = 0; a < pb.k; ++a) {
    for (int b = a + 1; b < pb.k; ++b) pb.pairs.emplace_back(a, b);
  }
  pb.rho.resize(static_cast<int>(pb.pairs.size()));
  for (std::size_t p = 0; p < pb.pairs.size(); ++p) {
    pb.rho(p) = (pb.control[pb.pairs[p].first] - pb.control[pb.pairs[p].second]).squaredNorm();
  }
  return pb;
}

// Control-point differences of each null vector, per pair: d[v][p].
std::vector<std::vector<Vec3>> pair_differences(const Problem& pb, const MatX& null_vectors) {
  std::vector<std::vector<Vec3>> d(null_vectors.cols());
  for (int v = 0; v < null_vectors.cols(); ++v) {
    for (const auto& [a, b] : pb.pairs) {
      d[v].push_back(null_vectors.col(v).segment<3>(3 * a) - null_vectors.col(v).segment<3>(3 * b));
    }
  }
  return d;
}

void gauss_newton(const Problem& pb, const std::vector<std::vector<Vec3>>& d, VecX& beta) {
  const int dims = static_cast<int>(beta.size());
  const int pairs = static_cast<int>(pb.pairs.size());
  for (int it = 0; it < 10; ++it) {
    MatX jac(pairs, dims);
    VecX r(pairs);
    for (int p = 0; p < pairs; ++p) {
      Vec3 s = Vec3::Zero();
      for (int v = 0; v < dims; ++v) s += beta(v) * d[v][p];
      r(p) = s.squaredNorm() - pb.rho(p);
      for (int v = 0; v < dims; ++v) jac(p, v) = 2.0 * s.dot(d[v][p]);
    }
    const VecX step = jac.completeOrthogonalDecomposition().solve(-r);
    if (!step.allFinite()) return;
    beta += step;
    if (step.norm() < 1e-14 * std::max(1.0, beta.norm())) return;
  }
}

Candidate recover(const Problem& pb, const MatX& null_vectors, const VecX& beta) {
  std::vector<Vec3> cc(pb.k, Vec3::Zero());
  for (int v = 0; v < beta.size(); ++v) {
    for (int j = 0; j < pb.k; ++j) cc[j] += beta(v) * null_vectors.col(v).segment<3>(3 * j);
  }
  const int n = static_cast<int>(pb.points.size());
  std::vector<Vec3> xc(n, Vec3::Zero());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < pb.k; ++j) xc[i] += pb.alphas(i, j) * cc[j];
  }
  int negative = 0;
  for (const Vec3& x : xc) negative += x.z() < 0.0;
  if (2 * negative > n) {
    for (Vec3& x : xc) x = -x;
  }

  Vec3 mean_model = Vec3::Zero(), mean_cam = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    mean_model += pb.points[i];
    mean_cam += xc[i];
  }
  mean_model /= n;
  mean_cam /= n;
  Mat3 h = Mat3::Zero();
  for (int i = 0; i < n; ++i) h += (xc[i] - mean_cam) * (pb.points[i] - mean_model).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 fix = Mat3::Identity();
  fix(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;

  Candidate c;
  c.rotation = svd.matrixU() * fix * svd.matrixV().transpose();
  c.translation = mean_cam - c.rotation * mean_model;
  if (!c.rotation.allFinite() || !c.translation.allFinite()) return c;

  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec3 x = c.rotation * pb.points[i] + c.translation;
    if (!(x.z() > 0.0)) return c;  // fails cheirality; error stays infinite
    err += (Vec2(x.x() / x.z(), x.y() / x.z()) - pb.xn[i]).norm();
  }
  c.error = err / n;
  return c;
}

}  // namespace

Pose epnp(std::span<const Correspondence> corr, const CameraModel& camera) {
  if (corr.size() < 4) {
    std::ostringstream msg;
    msg << "epnp needs at least 4 correspondences, got " << corr.size();
    throw Error(ErrorCode::kInsufficientCorrespondences, msg.str());
  }
  const Problem pb = setup(corr, camera);
  const int n = static_cast<int>(corr.size());
  const int cols = 3 * pb.k;

  MatX m = MatX::Zero(2 * n, cols);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < pb.k; ++j) {
      const double a = pb.alphas(i, j);
      m(2 * i, 3 * j) = a;
      m(2 * i, 3 * j + 2) = -a * pb.xn[i].x();
      m(2 * i + 1, 3 * j + 1) = a;
      m(2 * i + 1, 3 * j + 2) = -a * pb.xn[i].y();
    }
  }
  const MatX mtm = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<MatX> eig(mtm);
  const int dims = pb.k;
  const MatX null_vectors = eig.eigenvectors().leftCols(dims);
  const auto d = pair_differences(pb, null_vectors);
  const int pairs = static_cast<int>(pb.pairs.size());

  std::vector<VecX> starts;
  {
    // One null vector: beta^2 |d1|^2 = rho in the least-squares sense.
    double num = 0.0, den = 0.0;
    for (int p = 0; p < pairs; ++p) {
      num += pb.rho(p) * d[0][p].squaredNorm();
      den += d[0][p].squaredNorm() * d[0][p].squaredNorm();
    }
    VecX b = VecX::Zero(dims);
    b(0) = den > 0.0 ? std::sqrt(num / den) : 0.0;
    starts.push_back(b);
  }
  {
    // Two null vectors, linearized in (b11, b12, b22).
    MatX l(pairs, 3);
    for (int p = 0; p < pairs; ++p) {
      l(p, 0) = d[0][p].squaredNorm();
      l(p, 1) = 2.0 * d[0][p].dot(d[1][p]);
      l(p, 2) = d[1][p].squaredNorm();
    }
    const VecX s = l.completeOrthogonalDecomposition().solve(pb.rho);
    VecX b = VecX::Zero(dims);
    b(0) = std::sqrt(std::abs(s(0)));
    b(1) = (s(1) < 0.0 ? -1.0 : 1.0) * std::sqrt(std::abs(s(2)));
    starts.push_back(b);
  }
  if (pairs >= 6) {
    // Three null vectors, linearized in (b11, b12, b22, b13, b23, b33).
    MatX l(pairs, 6);
    for (int p = 0; p < pairs; ++p) {
      l(p, 0) = d[0][p].squaredNorm();
      l(p, 1) = 2.0 * d[0][p].dot(d[1][p]);
      l(p, 2) = d[1][p].squaredNorm();
      l(p, 3) = 2.0 * d[0][p].dot(d[2][p]);
      l(p, 4) = 2.0 * d[1][p].dot(d[2][p]);
      l(p, 5) = d[2][p].squaredNorm();
    }
    const VecX s = l.completeOrthogonalDecomposition().solve(pb.rho);
    VecX b = VecX::Zero(dims);
    b(0) = std::sqrt(std::abs(s(0)));
    b(1) = (s(1) < 0.0 ? -1.0 : 1.0) * std::sqrt(std::abs(s(2)));
    b(2) = (s(3) < 0.0 ? -1.0 : 1.0) * std::sqrt(std::abs(s(5)));
    starts.push_back(b);
  }

  Candidate best;
  for (VecX beta : starts) {
    if (!beta.allFinite()) continue;
    gauss_newton(pb, d, beta);
    const Candidate c = recover(pb, null_vectors, beta);
    if (c.error < best.error) best = c;
  }
  if (!std::isfinite(best.error)) {
    throw Error(ErrorCode::kDegenerateConfiguration, "epnp: no solution in front of the camera");
  }
  return Pose{Quaternion::from_matrix(best.rotation), best.translation};
}

}  // namespace satsynth
