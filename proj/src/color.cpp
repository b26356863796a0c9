#include "dockvision/color.hpp"

#include <algorithm>
#include <numbers>

namespace dockvision {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double wrap_hue(double degrees) {
  if (degrees >= 0.0 && degrees < 360.0) return degrees;
  double h = std::fmod(degrees, 360.0);
  if (h < 0.0) h += 360.0;
  // fmod of a tiny negative value can round up to exactly 360.
  if (h >= 360.0) h -= 360.0;
  return h;
}

double hue_distance(double a, double b) {
  const double d = std::fabs(wrap_hue(a) - wrap_hue(b));
  return std::min(d, 360.0 - d);
}

ColorRGB clamp(const ColorRGB& c) { return {clamp01(c.r), clamp01(c.g), clamp01(c.b)}; }

ColorHSV normalize(const ColorHSV& c) { return {wrap_hue(c.h), clamp01(c.s), clamp01(c.v)}; }

ColorHSV rgb_to_hsv(const ColorRGB& in) {
  const ColorRGB c = clamp(in);
  const double max = std::max({c.r, c.g, c.b});
  const double min = std::min({c.r, c.g, c.b});
  const double chroma = max - min;

  ColorHSV out{0.0, 0.0, max};
  if (max <= 0.0 || chroma <= 0.0) return out;
  out.s = chroma / max;

  double h;
  if (max == c.r) {
    h = (c.g - c.b) / chroma;
  } else if (max == c.g) {
    h = (c.b - c.r) / chroma + 2.0;
  } else {
    h = (c.r - c.g) / chroma + 4.0;
  }
  out.h = wrap_hue(60.0 * h);
  return out;
}

ColorRGB hsv_to_rgb(const ColorHSV& in) {
  const ColorHSV c = normalize(in);
  const double chroma = c.v * c.s;
  const double sector = c.h / 60.0;
  const double x = chroma * (1.0 - std::fabs(std::fmod(sector, 2.0) - 1.0));
  const double m = c.v - chroma;

  double r = 0.0, g = 0.0, b = 0.0;
  switch (static_cast<int>(sector)) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
  }
  return clamp({r + m, g + m, b + m});
}

ColorHSV pure(const ColorHSV& c) { return {wrap_hue(c.h), 1.0, 1.0}; }

ColorHSV complement(const ColorHSV& c) { return {wrap_hue(c.h + 180.0), c.s, c.v}; }

ColorHSV pure_complement(const ColorHSV& c) { return pure(complement(c)); }

ColorHSV ternary(const ColorHSV& c) { return {wrap_hue(c.h - 120.0), c.s, c.v}; }

ColorHSV pure_ternary(const ColorHSV& c) { return pure(ternary(c)); }

double chord_distance(const ColorHSV& a, const ColorHSV& b) {
  const double ax = a.s * std::cos(a.h * kDegToRad);
  const double ay = a.s * std::sin(a.h * kDegToRad);
  const double bx = b.s * std::cos(b.h * kDegToRad);
  const double by = b.s * std::sin(b.h * kDegToRad);
  return std::hypot(ax - bx, ay - by);
}

}  // namespace dockvision
