#include "dockvision/pose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "dockvision/error.hpp"

namespace dockvision {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Vector2d distort(const Eigen::Vector2d& n, const CameraIntrinsics& k) {
  const double r2 = n.squaredNorm();
  return n * (1.0 + k.k1 * r2 + k.k2 * r2 * r2);
}

double rmse_of(const pnp::Residuals& r) { return std::sqrt(r.squaredNorm() / 4.0); }

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

// Hartley normalization: zero mean, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::array<Eigen::Vector2d, 4>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= 4.0;
  double dist = 0.0;
  for (const auto& p : pts) dist += (p - mean).norm();
  dist /= 4.0;
  const double s = dist > 0.0 ? std::sqrt(2.0) / dist : 1.0;
  Eigen::Matrix3d t;
  t << s, 0.0, -s * mean.x(), 0.0, s, -s * mean.y(), 0.0, 0.0, 1.0;
  return t;
}

bool all_in_front(const ScenePose& pose, const MarkerGeometry& geometry) {
  for (Corner c : kCorners) {
    if ((pose.rotation * geometry.corner(c) + pose.translation).z() <= 0.0) return false;
  }
  return true;
}

}  // namespace

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  if (theta < 1e-12) return Eigen::Matrix3d::Identity() + skew(omega);
  return Eigen::AngleAxisd(theta, omega / theta).toRotationMatrix();
}

double rotation_angle_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const Eigen::Matrix3d d = a.transpose() * b;
  const double c = std::clamp(0.5 * (d.trace() - 1.0), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

Eigen::Vector2d project(const Eigen::Vector3d& point, const ScenePose& pose,
                        const CameraIntrinsics& k) {
  const Eigen::Vector3d p = pose.rotation * point + pose.translation;
  if (!(p.z() > 0.0)) throw Error("point is behind the camera");
  const Eigen::Vector2d d = distort(Eigen::Vector2d(p.x() / p.z(), p.y() / p.z()), k);
  return {k.fx * d.x() + k.cx, k.fy * d.y() + k.cy};
}

Eigen::Vector2d normalize_pixel(const Eigen::Vector2d& pixel, const CameraIntrinsics& k) {
  const Eigen::Vector2d d((pixel.x() - k.cx) / k.fx, (pixel.y() - k.cy) / k.fy);
  if (k.k1 == 0.0 && k.k2 == 0.0) return d;
  Eigen::Vector2d n = d;
  for (int i = 0; i < 50; ++i) {
    const double r2 = n.squaredNorm();
    const Eigen::Vector2d next = d / (1.0 + k.k1 * r2 + k.k2 * r2 * r2);
    if ((next - n).norm() < 1e-15) return next;
    n = next;
  }
  return n;
}

CornerPixels corner_pixels(const LandmarkDetection& detection) {
  CornerPixels px;
  for (Corner c : kCorners) {
    const Blob& b = detection.at(c);
    px[static_cast<int>(c)] = {b.cx, b.cy};
  }
  return px;
}

namespace pnp {

Residuals residuals(const ScenePose& pose, const MarkerGeometry& geometry,
                    const CornerPixels& pixels, const CameraIntrinsics& k) {
  Residuals r;
  for (Corner c : kCorners) {
    const int i = static_cast<int>(c);
    r.segment<2>(2 * i) = project(geometry.corner(c), pose, k) - pixels[i];
  }
  return r;
}

Jacobian jacobian(const ScenePose& pose, const MarkerGeometry& geometry,
                  const CameraIntrinsics& k) {
  Jacobian jac;
  for (Corner c : kCorners) {
    const int i = static_cast<int>(c);
    const Eigen::Vector3d rotated = pose.rotation * geometry.corner(c);
    const Eigen::Vector3d p = rotated + pose.translation;
    const double iz = 1.0 / p.z();
    const double x = p.x() * iz;
    const double y = p.y() * iz;
    const double r2 = x * x + y * y;
    const double f = 1.0 + k.k1 * r2 + k.k2 * r2 * r2;
    const double df = k.k1 + 2.0 * k.k2 * r2;  // d f / d r2

    Eigen::Matrix2d d_dist;  // d (xd, yd) / d (x, y)
    d_dist << f + 2.0 * x * x * df, 2.0 * x * y * df, 2.0 * x * y * df, f + 2.0 * y * y * df;
    Eigen::Matrix<double, 2, 3> d_norm;  // d (x, y) / d p
    d_norm << iz, 0.0, -x * iz, 0.0, iz, -y * iz;
    const Eigen::Matrix<double, 2, 3> d_pix =
        Eigen::Vector2d(k.fx, k.fy).asDiagonal() * d_dist * d_norm;

    jac.block<2, 3>(2 * i, 0) = -d_pix * skew(rotated);
    jac.block<2, 3>(2 * i, 3) = d_pix;
  }
  return jac;
}

ScenePose apply_increment(const ScenePose& pose, const Eigen::Matrix<double, 6, 1>& delta) {
  ScenePose out = pose;
  out.rotation = nearest_rotation(so3_exp(delta.head<3>()) * pose.rotation);
  out.translation = pose.translation + delta.tail<3>();
  return out;
}

RefineResult refine(const ScenePose& initial, const MarkerGeometry& geometry,
                    const CornerPixels& pixels, const CameraIntrinsics& k) {
  constexpr int kMaxIterations = 100;
  constexpr double kStepTolerance = 1e-10;

  RefineResult res{initial, 0, false};
  double lambda = 1e-3;
  Residuals r = residuals(res.pose, geometry, pixels, k);
  double cost = r.squaredNorm();
  Jacobian jac = jacobian(res.pose, geometry, k);

  while (res.iterations < kMaxIterations) {
    ++res.iterations;
    const Eigen::Matrix<double, 6, 6> normal =
        jac.transpose() * jac + lambda * Eigen::Matrix<double, 6, 6>::Identity();
    const Eigen::Matrix<double, 6, 1> step = normal.ldlt().solve(-jac.transpose() * r);
    if (!step.allFinite()) break;
    if (step.norm() < kStepTolerance) {
      res.converged = true;
      break;
    }

    ScenePose trial = apply_increment(res.pose, step);
    bool accepted = false;
    if (all_in_front(trial, geometry)) {
      const Residuals tr = residuals(trial, geometry, pixels, k);
      const double tcost = tr.squaredNorm();
      if (tcost < cost) {
        res.pose = trial;
        r = tr;
        cost = tcost;
        jac = jacobian(res.pose, geometry, k);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
      }
    }
    if (!accepted) {
      lambda *= 10.0;
      if (lambda > 1e12) {
        res.converged = true;  // no descent direction left at this point
        break;
      }
    }
  }
  res.pose.reprojection_rmse = rmse_of(r);
  return res;
}

ScenePose pose_from_homography(const CornerPixels& pixels, const MarkerGeometry& geometry,
                               const CameraIntrinsics& k) {
  std::array<Eigen::Vector2d, 4> obj, img;
  for (Corner c : kCorners) {
    const int i = static_cast<int>(c);
    obj[i] = geometry.corner(c).head<2>();
    img[i] = normalize_pixel(pixels[i], k);
  }
  const Eigen::Matrix3d to = normalizing_transform(obj);
  const Eigen::Matrix3d ti = normalizing_transform(img);

  Eigen::Matrix<double, 8, 9> a;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d p = to * obj[i].homogeneous();
    const Eigen::Vector3d q = ti * img[i].homogeneous();
    const double u = q.x() / q.z();
    const double v = q.y() / q.z();
    a.row(2 * i) << -p.x(), -p.y(), -1.0, 0.0, 0.0, 0.0, u * p.x(), u * p.y(), u;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, -p.x(), -p.y(), -1.0, v * p.x(), v * p.y(), v;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d hm = ti.inverse() * hn * to;

  const Eigen::Vector3d h1 = hm.col(0);
  const Eigen::Vector3d h2 = hm.col(1);
  const Eigen::Vector3d h3 = hm.col(2);
  double scale = std::sqrt(h1.norm() * h2.norm());
  if (!(scale > 0.0)) throw PoseError(PoseError::Kind::kConditioning, "degenerate homography");
  if (h3.z() < 0.0) scale = -scale;

  Eigen::Matrix3d rinit;
  rinit.col(0) = h1 / scale;
  rinit.col(1) = h2 / scale;
  rinit.col(2) = rinit.col(0).cross(rinit.col(1));
  ScenePose pose;
  pose.rotation = nearest_rotation(rinit);
  pose.translation = h3 / scale;
  return pose;
}

ScenePose mirror_pose(const ScenePose& pose) {
  const Eigen::Vector3d v = pose.translation.normalized();
  const Eigen::Matrix3d flip_sight = 2.0 * v * v.transpose() - Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d flip_plane = Eigen::Vector3d(-1.0, -1.0, 1.0).asDiagonal();
  ScenePose out = pose;
  out.rotation = nearest_rotation(flip_sight * pose.rotation * flip_plane);
  return out;
}

}  // namespace pnp

ScenePose solve_pnp(const CornerPixels& pixels, const MarkerGeometry& geometry,
                    const CameraIntrinsics& k) {
  std::array<Eigen::Vector2d, 4> n;
  double extent = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (!pixels[i].allFinite()) throw PoseError(PoseError::Kind::kConditioning, "non-finite corner");
    n[i] = normalize_pixel(pixels[i], k);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) extent = std::max(extent, (n[i] - n[j]).norm());
  double min_area = std::numeric_limits<double>::infinity();
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Eigen::Vector2d, 3> t;
    for (int i = 0, j = 0; i < 4; ++i)
      if (i != skip) t[j++] = n[i];
    const Eigen::Vector2d d = t[1] - t[0];
    const Eigen::Vector2d e = t[2] - t[0];
    min_area = std::min(min_area, 0.5 * std::fabs(d.x() * e.y() - d.y() * e.x()));
  }
  if (!(extent > 0.0) || min_area / (extent * extent) < 1e-4)
    throw PoseError(PoseError::Kind::kConditioning, "marker corners are nearly collinear");

  const ScenePose init = pnp::pose_from_homography(pixels, geometry, k);
  const std::array<ScenePose, 2> starts = {init, pnp::mirror_pose(init)};

  bool have = false;
  ScenePose best;
  for (const auto& start : starts) {
    if (!all_in_front(start, geometry)) continue;
    const auto refined = pnp::refine(start, geometry, pixels, k);
    const ScenePose& p = refined.pose;
    if (!std::isfinite(p.reprojection_rmse) || !all_in_front(p, geometry)) continue;
    if (!have || p.reprojection_rmse < best.reprojection_rmse) {
      best = p;
      have = true;
    }
  }
  if (!have) throw PoseError(PoseError::Kind::kNoPose, "no pose with positive depth");
  return best;
}

ScenePose solve_pnp(const LandmarkDetection& detection, const MarkerGeometry& geometry,
                    const CameraIntrinsics& k) {
  return solve_pnp(corner_pixels(detection), geometry, k);
}

}  // namespace dockvision
