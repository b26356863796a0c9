#include <cmath>

#include "doctest.h"

#include "dockvision/background.hpp"
#include "dockvision/simulator.hpp"

using namespace dockvision;

namespace {

SceneSpec quiet_scene() {
  SceneSpec s;
  s.width = 160;
  s.height = 120;
  s.intrinsics = {150.0, 150.0, 79.5, 59.5, 0.0, 0.0, 160, 120};
  s.marker_pose = frontal_pose(1.0);
  s.background_gradient = {};
  s.noise_sigma = 0.0;
  return s;
}

ColorRGB quantized(const ColorRGB& c) {
  return {from_byte(to_byte(c.r)), from_byte(to_byte(c.g)), from_byte(to_byte(c.b))};
}

}  // namespace

TEST_CASE("noise-free background-only scene is a constant frame") {
  SceneSpec s = quiet_scene();
  s.markers_visible = false;
  const auto [frame, truth] = render(s);
  const ColorRGB want = quantized(hsv_to_rgb(s.background_color));
  for (const auto& p : frame.image.pixels()) REQUIRE(p == want);
  CHECK(truth.background_mean == s.background_color);
}

TEST_CASE("an emitter that is off leaves the background untouched") {
  SceneSpec s = quiet_scene();
  s.marker_emit_color = {0, 0, 0};
  SceneSpec off = s;
  off.markers_visible = false;
  CHECK(render(s).first == render(off).first);
}

TEST_CASE("marker disks carry the sensed color") {
  SceneSpec s = quiet_scene();
  const auto [frame, truth] = render(s);
  const ColorRGB want =
      quantized(predict_sensed_color(hsv_to_rgb(s.background_color), s.marker_emit_color));
  for (const auto& pixels : truth.marker_pixels) {
    REQUIRE(!pixels.empty());
    for (auto idx : pixels) REQUIRE(frame.image.pixels()[idx] == want);
  }
}

TEST_CASE("ground-truth corners are the projected geometry") {
  SceneSpec s;
  const auto [frame, truth] = render(s);
  for (Corner c : kCorners) {
    const auto i = static_cast<int>(c);
    const auto want = project(s.geometry.corner(c), s.marker_pose, s.intrinsics);
    CHECK((truth.corners[i] - want).norm() < 1e-6);
    CHECK(truth.visible[i]);
    CHECK(truth.pixel_radius[i] == doctest::Approx(600 * 0.03 / 3.0));
  }
  const double horizontal = truth.corners[1].x() - truth.corners[0].x();
  const double vertical = truth.corners[2].y() - truth.corners[0].y();
  CHECK(horizontal / vertical == doctest::Approx(0.89 / 0.127).epsilon(1e-9));
  CHECK(horizontal / vertical == doctest::Approx(7.008).epsilon(1e-3));
}

TEST_CASE("corners off the image are flagged") {
  SceneSpec s = quiet_scene();
  s.marker_pose = frontal_pose(1.0, 0.5, 0.0);
  const auto [frame, truth] = render(s);
  CHECK_FALSE(truth.visible[static_cast<int>(Corner::kTopRight)]);
  CHECK(truth.visible[static_cast<int>(Corner::kTopLeft)]);
}

TEST_CASE("rendering is a pure function of the spec") {
  SceneSpec s;
  s.seed = 99;
  const auto a = render(s);
  const auto b = render(s);
  CHECK(a.first == b.first);
  s.seed = 100;
  CHECK_FALSE(render(s).first == a.first);
}

TEST_CASE("noise has the requested spread") {
  SceneSpec s = quiet_scene();
  s.markers_visible = false;
  s.noise_sigma = 4.0 / 255.0;
  const auto [frame, truth] = render(s);
  const ColorRGB bg = hsv_to_rgb(s.background_color);
  double sum = 0.0, sum2 = 0.0;
  for (const auto& p : frame.image.pixels()) {
    for (double d : {p.r - bg.r, p.g - bg.g, p.b - bg.b}) {
      sum += d;
      sum2 += d * d;
    }
  }
  const double n = 3.0 * frame.image.size();
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::fabs(mean) < 0.2 / 255.0);
  // 8-bit rounding adds 1/12 LSB^2 of variance.
  CHECK(sd * 255.0 == doctest::Approx(std::sqrt(16.0 + 1.0 / 12.0)).epsilon(0.03));
}

TEST_CASE("brighter emitters never darken marker pixels") {
  SceneSpec s = quiet_scene();
  s.marker_emit_color = {0.2, 0.4, 0.1};
  const auto [dim, truth] = render(s);
  s.marker_emit_color = {0.5, 0.9, 0.1};
  const auto bright = render(s).first;
  for (std::size_t i = 0; i < dim.image.size(); ++i) {
    REQUIRE(bright.image.pixels()[i].r >= dim.image.pixels()[i].r);
    REQUIRE(bright.image.pixels()[i].g >= dim.image.pixels()[i].g);
    REQUIRE(bright.image.pixels()[i].b >= dim.image.pixels()[i].b);
  }
}

TEST_CASE("gradient spans the rows symmetrically") {
  SceneSpec s = quiet_scene();
  s.background_gradient = {120.0, 0.0, 0.3};
  const auto top = rgb_to_hsv(background_at_row(s, 0));
  const auto bottom = rgb_to_hsv(background_at_row(s, s.height - 1));
  CHECK(hue_distance(top.h, 140.0) < 1e-9);
  CHECK(hue_distance(bottom.h, 260.0) < 1e-9);
  CHECK(top.v == doctest::Approx(0.3));
  CHECK(bottom.v == doctest::Approx(0.6));
}

TEST_CASE("hue sweep renders one frame per hue with recoverable backgrounds") {
  SceneSpec s = quiet_scene();
  s.noise_sigma = 2.0 / 255.0;
  CHECK(sweep_backgrounds(s, {}).empty());
  const auto frames = sweep_backgrounds(s, {120.0, 240.0});
  REQUIRE(frames.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto est = extract_background(gaussian_blur(frames[i].first, 2.0, 5));
    CHECK(hue_distance(est.mean_color.h, 120.0 * (i + 1)) < 3.0);
  }
  SceneSpec second = s;
  second.background_color.h = 240.0;
  second.seed = s.seed + 1;
  CHECK(frames[1].first == render(second).first);
}

TEST_CASE("dual views share the background but not the noise") {
  SceneSpec s;
  s.distractors.push_back(orange_buoy(100, 100, 20));
  const auto [a, b] = render_dual_view(s, 5, 6);
  CHECK_FALSE(a == b);
  const auto ea = extract_background(gaussian_blur(a, 2.0, 5));
  const auto eb = extract_background(gaussian_blur(b, 2.0, 5));
  CHECK(hue_distance(ea.mean_color.h, eb.mean_color.h) < 2.0);

  SceneSpec clean = s;
  clean.noise_sigma = 0.0;
  clean.markers_visible = false;
  clean.distractors.clear();
  const auto [a0, b0] = render_dual_view(clean, 1, 2);
  CHECK(b0 == render(clean).first);
}

TEST_CASE("orange buoy preset") {
  const auto d = orange_buoy(10, 20, 5);
  const auto c = rgb_to_hsv(d.color);
  CHECK(c.h == doctest::Approx(30.0));
  CHECK(c.s == doctest::Approx(0.9));
  CHECK(c.v == doctest::Approx(0.9));
  CHECK(d.shape == Distractor::Shape::kDisk);
}
