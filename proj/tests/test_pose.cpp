#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "doctest.h"

#include "dockvision/error.hpp"
#include "dockvision/pose.hpp"

using namespace dockvision;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ScenePose pose_of(double rx, double ry, double rz, const Eigen::Vector3d& t) {
  ScenePose p;
  p.rotation = (Eigen::AngleAxisd(rz, Eigen::Vector3d::UnitZ()) *
                Eigen::AngleAxisd(ry, Eigen::Vector3d::UnitY()) *
                Eigen::AngleAxisd(rx, Eigen::Vector3d::UnitX()))
                   .toRotationMatrix();
  p.translation = t;
  return p;
}

CornerPixels project_corners(const ScenePose& pose, const MarkerGeometry& g,
                             const CameraIntrinsics& k) {
  CornerPixels px;
  for (Corner c : kCorners) px[static_cast<int>(c)] = project(g.corner(c), pose, k);
  return px;
}

ScenePose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> depth(1.0, 5.0), ang(-30.0, 30.0), lat(-0.2, 0.2);
  const double z = depth(rng);
  return pose_of(ang(rng) * kDeg, ang(rng) * kDeg, ang(rng) * kDeg, {lat(rng) * z, lat(rng) * z, z});
}

}  // namespace

TEST_CASE("marker geometry") {
  const MarkerGeometry g;
  CHECK(g.width == 0.89);
  CHECK(g.height == 0.127);
  CHECK(g.corner(Corner::kTopLeft) == Eigen::Vector3d(-0.445, -0.0635, 0));
  CHECK(g.corner(Corner::kBottomRight) == Eigen::Vector3d(0.445, 0.0635, 0));
  CHECK(g.scaled(2.0).width == 1.78);
}

TEST_CASE("pinhole projection by hand") {
  const CameraIntrinsics k;
  ScenePose p;
  p.translation = {0, 0, 3};
  const auto uv = project({0.445, 0.0635, 0}, p, k);
  CHECK(uv.x() == doctest::Approx(319.5 + 600 * 0.445 / 3));
  CHECK(uv.y() == doctest::Approx(239.5 + 600 * 0.0635 / 3));

  CameraIntrinsics d = k;
  d.k1 = -0.2;
  d.k2 = 0.05;
  const double x = 0.445 / 3, y = 0.0635 / 3, r2 = x * x + y * y;
  const double f = 1 + d.k1 * r2 + d.k2 * r2 * r2;
  const auto ud = project({0.445, 0.0635, 0}, p, d);
  CHECK(ud.x() == doctest::Approx(319.5 + 600 * x * f));
  CHECK(ud.y() == doctest::Approx(239.5 + 600 * y * f));

  ScenePose behind;
  behind.translation = {0, 0, -1};
  CHECK_THROWS_AS(project({0, 0, 0}, behind, k), Error);
}

TEST_CASE("normalize_pixel inverts the distortion model") {
  CameraIntrinsics k;
  k.k1 = -0.25;
  k.k2 = 0.08;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d p{u(rng), u(rng) * 0.75, 1.0};
    ScenePose id;
    id.translation = Eigen::Vector3d::Zero();
    const auto px = project(p, id, k);
    const auto n = normalize_pixel(px, k);
    REQUIRE(n.x() == doctest::Approx(p.x()).epsilon(1e-10));
    REQUIRE(n.y() == doctest::Approx(p.y()).epsilon(1e-10));
  }
}

TEST_CASE("exponential map") {
  CHECK(so3_exp(Eigen::Vector3d::Zero()).isApprox(Eigen::Matrix3d::Identity()));
  const Eigen::Vector3d w{0.3, -0.2, 0.5};
  const Eigen::Matrix3d r = so3_exp(w);
  CHECK((r.transpose() * r).isApprox(Eigen::Matrix3d::Identity(), 1e-12));
  CHECK(r.determinant() == doctest::Approx(1.0));
  CHECK(r.isApprox(Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix(), 1e-12));
  CHECK(rotation_angle_deg(Eigen::Matrix3d::Identity(), r) == doctest::Approx(w.norm() / kDeg));
}

TEST_CASE("analytic Jacobian matches central differences") {
  CameraIntrinsics k;
  k.k1 = -0.1;
  k.k2 = 0.02;
  const MarkerGeometry g;
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const ScenePose pose = random_pose(rng);
    const CornerPixels target = project_corners(random_pose(rng), g, k);
    const auto j = pnp::jacobian(pose, g, k);
    for (int c = 0; c < 6; ++c) {
      Eigen::Matrix<double, 6, 1> d = Eigen::Matrix<double, 6, 1>::Zero();
      const double h = 1e-6;
      d[c] = h;
      const auto plus = pnp::residuals(pnp::apply_increment(pose, d), g, target, k);
      d[c] = -h;
      const auto minus = pnp::residuals(pnp::apply_increment(pose, d), g, target, k);
      const Eigen::Matrix<double, 8, 1> fd = (plus - minus) / (2 * h);
      for (int r = 0; r < 8; ++r)
        REQUIRE(j(r, c) == doctest::Approx(fd[r]).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("mirror pose keeps translation and reprojects almost the same") {
  const ScenePose p = pose_of(20 * kDeg, 0, 0, {0, 0, 3});
  const ScenePose m = pnp::mirror_pose(p);
  CHECK(m.translation.isApprox(p.translation));
  CHECK((m.rotation.transpose() * m.rotation).isApprox(Eigen::Matrix3d::Identity(), 1e-12));
  CHECK(m.rotation.determinant() == doctest::Approx(1.0));
  CHECK(rotation_angle_deg(p.rotation, m.rotation) == doctest::Approx(40.0).epsilon(1e-6));
  CHECK(pnp::mirror_pose(m).rotation.isApprox(p.rotation, 1e-12));
}

TEST_CASE("homography initialization is close on noise-free corners") {
  const CameraIntrinsics k;
  const MarkerGeometry g;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const ScenePose truth = random_pose(rng);
    const ScenePose init = pnp::pose_from_homography(project_corners(truth, g, k), g, k);
    const ScenePose alt = pnp::mirror_pose(init);
    const double err = std::min(rotation_angle_deg(init.rotation, truth.rotation),
                                rotation_angle_deg(alt.rotation, truth.rotation));
    // Exact up to the conditioning of the DLT solve.
    REQUIRE(err < 1e-4);
    REQUIRE((init.translation - truth.translation).norm() < 1e-6 * truth.translation.norm());
  }
}

TEST_CASE("solve_pnp recovers random poses") {
  CameraIntrinsics k;
  const MarkerGeometry g;
  std::mt19937_64 rng(9);
  for (double k1 : {0.0, -0.15}) {
    k.k1 = k1;
    for (int trial = 0; trial < 200; ++trial) {
      const ScenePose truth = random_pose(rng);
      const auto pose = solve_pnp(project_corners(truth, g, k), g, k);
      REQUIRE((pose.translation - truth.translation).norm() / truth.translation.norm() < 1e-6);
      REQUIRE(rotation_angle_deg(pose.rotation, truth.rotation) < 1e-5);
      REQUIRE(pose.reprojection_rmse < 1e-6);
    }
  }
}

TEST_CASE("refinement reduces reprojection error from a perturbed start") {
  const CameraIntrinsics k;
  const MarkerGeometry g;
  const ScenePose truth = pose_of(10 * kDeg, -15 * kDeg, 5 * kDeg, {0.1, -0.05, 2.5});
  const auto px = project_corners(truth, g, k);
  ScenePose start = truth;
  start.rotation = so3_exp({0.05, -0.03, 0.02}) * truth.rotation;
  start.translation += Eigen::Vector3d{0.05, 0.02, -0.2};
  const auto r = pnp::refine(start, g, px, k);
  CHECK(r.converged);
  CHECK(r.iterations <= 100);
  CHECK(r.pose.reprojection_rmse < 1e-8);
  CHECK(pnp::residuals(r.pose, g, px, k).norm() < pnp::residuals(start, g, px, k).norm());
}

TEST_CASE("degenerate corners are rejected") {
  const CameraIntrinsics k;
  const MarkerGeometry g;
  const CornerPixels line{Eigen::Vector2d{100, 100}, Eigen::Vector2d{200, 100.01},
                          Eigen::Vector2d{300, 100}, Eigen::Vector2d{400, 100.02}};
  try {
    solve_pnp(line, g, k);
    FAIL("expected a conditioning error");
  } catch (const PoseError& e) {
    CHECK(e.kind() == PoseError::Kind::kConditioning);
  }
  CornerPixels nan_px = line;
  nan_px[2] = {std::nan(""), 0};
  CHECK_THROWS_AS(solve_pnp(nan_px, g, k), PoseError);
}

TEST_CASE("corner_pixels follows TL, TR, BL, BR") {
  LandmarkDetection det;
  for (int i = 0; i < 4; ++i) {
    det.corners[i].cx = i;
    det.corners[i].cy = 10 + i;
  }
  const auto px = corner_pixels(det);
  for (int i = 0; i < 4; ++i) CHECK(px[i] == Eigen::Vector2d(i, 10 + i));
}
