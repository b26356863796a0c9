#pragma once

#include <array>

#include <Eigen/Core>

#include "dockvision/detector.hpp"

namespace dockvision {

struct CameraIntrinsics {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 319.5;
  double cy = 239.5;
  double k1 = 0.0;
  double k2 = 0.0;
  int width = 640;
  int height = 480;
};

/// Docking-station pose in the camera frame: x_cam = R x_ds + t.
struct ScenePose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d(0.0, 0.0, 1.0);
  double reprojection_rmse = 0.0;
};

/// Pinhole projection with radial distortion (k1, k2). Throws Error when
/// the transformed point does not have positive depth.
Eigen::Vector2d project(const Eigen::Vector3d& point, const ScenePose& pose,
                        const CameraIntrinsics& k);

/// Pixel -> undistorted normalized image coordinates (fixed-point inversion
/// of the radial model).
Eigen::Vector2d normalize_pixel(const Eigen::Vector2d& pixel, const CameraIntrinsics& k);

using CornerPixels = std::array<Eigen::Vector2d, 4>;  // TL, TR, BL, BR

CornerPixels corner_pixels(const LandmarkDetection& detection);

/// Planar PnP for the four marker corners: homography initialization, both
/// mirror-ambiguity branches refined by damped Gauss-Newton, lowest
/// reprojection error with all corners in front of the camera wins.
/// Throws PoseError (kConditioning for near-collinear corners, kNoPose when
/// no branch converges in front of the camera).
ScenePose solve_pnp(const CornerPixels& pixels, const MarkerGeometry& geometry,
                    const CameraIntrinsics& k);
ScenePose solve_pnp(const LandmarkDetection& detection, const MarkerGeometry& geometry,
                    const CameraIntrinsics& k);

/// Rotation angle of a^T b in degrees.
double rotation_angle_deg(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

/// Rodrigues exponential map.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega);

namespace pnp {

using Residuals = Eigen::Matrix<double, 8, 1>;
using Jacobian = Eigen::Matrix<double, 8, 6>;

/// Stacked (u, v) reprojection errors of the four corners.
Residuals residuals(const ScenePose& pose, const MarkerGeometry& geometry,
                    const CornerPixels& pixels, const CameraIntrinsics& k);

/// d residuals / d (omega, dt) for the update R <- exp(omega) R, t <- t + dt.
Jacobian jacobian(const ScenePose& pose, const MarkerGeometry& geometry,
                  const CameraIntrinsics& k);

/// Applies one (omega, dt) increment.
ScenePose apply_increment(const ScenePose& pose, const Eigen::Matrix<double, 6, 1>& delta);

struct RefineResult {
  ScenePose pose;
  int iterations = 0;
  bool converged = false;
};

/// Levenberg damping: lambda starts at 1e-3, x10 on a rejected step and
/// /10 on an accepted one; stops when the step norm drops below 1e-10 or
/// after 100 iterations.
RefineResult refine(const ScenePose& initial, const MarkerGeometry& geometry,
                    const CornerPixels& pixels, const CameraIntrinsics& k);

/// Pose from the plane-to-image homography.
ScenePose pose_from_homography(const CornerPixels& pixels, const MarkerGeometry& geometry,
                               const CameraIntrinsics& k);

/// The other pose of the planar mirror ambiguity: same translation, plane
/// normal reflected about the line of sight.
ScenePose mirror_pose(const ScenePose& pose);

}  // namespace pnp

}  // namespace dockvision
