#include <cmath>
#include <random>

#include "doctest.h"

#include "dockvision/color.hpp"
#include "oracles.hpp"

using namespace dockvision;

namespace {

void check_hsv(const ColorHSV& got, const ColorHSV& want, double tol = 1e-12) {
  CHECK(hue_distance(got.h, want.h) <= tol);
  CHECK(got.s == doctest::Approx(want.s).epsilon(tol));
  CHECK(got.v == doctest::Approx(want.v).epsilon(tol));
}

}  // namespace

TEST_CASE("primaries map to the hexcone hues") {
  check_hsv(rgb_to_hsv({1, 0, 0}), {0, 1, 1});
  check_hsv(rgb_to_hsv({0, 1, 0}), {120, 1, 1});
  check_hsv(rgb_to_hsv({0, 0, 1}), {240, 1, 1});
  check_hsv(rgb_to_hsv({1, 1, 0}), {60, 1, 1});
  check_hsv(rgb_to_hsv({0.2, 0.4, 0.6}), {210, 2.0 / 3.0, 0.6});
}

TEST_CASE("achromatic colors have hue 0 and saturation 0") {
  for (double v : {0.0, 0.25, 0.5, 1.0}) {
    const auto c = rgb_to_hsv({v, v, v});
    CHECK(c.h == 0.0);
    CHECK(c.s == 0.0);
    CHECK(c.v == v);
  }
}

TEST_CASE("rgb_to_hsv agrees with the reference conversion") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double r = u(rng), g = u(rng), b = u(rng);
    const auto want = oracle::rgb_to_hsv(r, g, b);
    const auto got = rgb_to_hsv({r, g, b});
    REQUIRE(hue_distance(got.h, want.h) < 1e-9);
    REQUIRE(std::fabs(got.s - want.s) < 1e-12);
    REQUIRE(got.v == want.v);
  }
}

TEST_CASE("hsv_to_rgb agrees with the reference conversion") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uh(0.0, 360.0), u(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double h = uh(rng), s = u(rng), v = u(rng);
    const auto want = oracle::hsv_to_rgb(h, s, v);
    const auto got = hsv_to_rgb({h, s, v});
    REQUIRE(std::fabs(got.r - want.r) < 1e-12);
    REQUIRE(std::fabs(got.g - want.g) < 1e-12);
    REQUIRE(std::fabs(got.b - want.b) < 1e-12);
  }
}

TEST_CASE("hsv round trip for chromatic colors") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uh(0.0, 360.0), u(0.01, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const ColorHSV c{uh(rng), u(rng), u(rng)};
    const auto back = rgb_to_hsv(hsv_to_rgb(c));
    REQUIRE(hue_distance(back.h, c.h) < 1e-9);
    REQUIRE(std::fabs(back.s - c.s) < 1e-12);
    REQUIRE(std::fabs(back.v - c.v) < 1e-12);
  }
}

TEST_CASE("wrap_hue and hue_distance") {
  CHECK(wrap_hue(360.0) == 0.0);
  CHECK(wrap_hue(-90.0) == 270.0);
  CHECK(wrap_hue(725.0) == doctest::Approx(5.0));
  const double tiny = wrap_hue(-1e-18);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 360.0);
  CHECK(hue_distance(350, 10) == doctest::Approx(20.0));
  CHECK(hue_distance(0, 180) == 180.0);
  CHECK(hue_distance(10, 350) == hue_distance(350, 10));
}

TEST_CASE("complement and ternary") {
  CHECK(complement({30, 0.4, 0.5}) == ColorHSV{210, 0.4, 0.5});
  CHECK(complement({200, 0.4, 0.5}) == ColorHSV{20, 0.4, 0.5});
  CHECK(ternary({200, 0.4, 0.5}) == ColorHSV{80, 0.4, 0.5});
  CHECK(ternary({60, 0.4, 0.5}) == ColorHSV{300, 0.4, 0.5});
  CHECK(pure_complement({200, 0.4, 0.5}) == ColorHSV{20, 1, 1});
  CHECK(pure_ternary({200, 0.4, 0.5}) == ColorHSV{80, 1, 1});
  CHECK(pure({123, 0.0, 0.0}) == ColorHSV{123, 1, 1});
}

TEST_CASE("complement is an involution and ternary has order three") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> uh(0.0, 360.0), u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const ColorHSV c{uh(rng), u(rng), u(rng)};
    REQUIRE(hue_distance(complement(complement(c)).h, c.h) <= 1e-12);
    REQUIRE(hue_distance(ternary(ternary(ternary(c))).h, c.h) <= 1e-12);
    REQUIRE(hue_distance(ternary(c).h, c.h) == doctest::Approx(120.0));
  }
}

TEST_CASE("chord distance on the hue-saturation disk") {
  CHECK(chord_distance({0, 1, 1}, {180, 1, 1}) == doctest::Approx(2.0));
  CHECK(chord_distance({0, 1, 1}, {90, 1, 1}) == doctest::Approx(std::sqrt(2.0)));
  CHECK(chord_distance({45, 0.3, 0.2}, {45, 0.3, 0.9}) == doctest::Approx(0.0));
  CHECK(chord_distance({0, 0, 0}, {77, 0.5, 1}) == doctest::Approx(0.5));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uh(0.0, 360.0), u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const ColorHSV c{uh(rng), u(rng), u(rng)};
    REQUIRE(std::fabs(chord_distance(c, pure_complement(c)) - (c.s + 1.0)) <= 1e-12);
    const ColorHSV d{uh(rng), u(rng), u(rng)};
    REQUIRE(chord_distance(c, d) == doctest::Approx(chord_distance(d, c)));
  }
}

TEST_CASE("8-bit helpers round trip and clamp") {
  for (int b = 0; b < 256; ++b) REQUIRE(to_byte(from_byte(b)) == b);
  CHECK(to_byte(-0.5) == 0);
  CHECK(to_byte(1.5) == 255);
  CHECK(to_byte(0.5) == 128);
}

TEST_CASE("normalize clamps and wraps") {
  CHECK(normalize({-30, 1.5, -0.2}) == ColorHSV{330, 1, 0});
  CHECK(clamp(ColorRGB{-1, 0.5, 2}) == ColorRGB{0, 0.5, 1});
}
