#pragma once

#include <cmath>

namespace dockvision {

/// RGB color with channels in [0, 1]. 8-bit I/O scales by 255.
struct ColorRGB {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const ColorRGB&, const ColorRGB&) = default;
};

/// HSV color: hue in degrees [0, 360), saturation and value in [0, 1].
struct ColorHSV {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;

  friend bool operator==(const ColorHSV&, const ColorHSV&) = default;
};

/// Wraps any finite angle into [0, 360).
double wrap_hue(double degrees);

/// Smallest absolute angular difference between two hues, in [0, 180].
double hue_distance(double a, double b);

/// Clamps channels to [0, 1].
ColorRGB clamp(const ColorRGB& c);

/// Normalizes hue to [0, 360) and clamps s, v to [0, 1].
ColorHSV normalize(const ColorHSV& c);

/// Standard hexcone conversion (red 0, green 120, blue 240). Achromatic
/// colors get hue 0.
ColorHSV rgb_to_hsv(const ColorRGB& c);
ColorRGB hsv_to_rgb(const ColorHSV& c);

ColorHSV pure(const ColorHSV& c);

/// Hue rotated by half a turn, (H + 180) mod 360, so complement is an
/// involution.
ColorHSV complement(const ColorHSV& c);
ColorHSV pure_complement(const ColorHSV& c);

/// Hue offset of 240 degrees clockwise: (H - 120) mod 360.
ColorHSV ternary(const ColorHSV& c);
ColorHSV pure_ternary(const ColorHSV& c);

/// Euclidean distance between two colors placed on the hue/saturation
/// disk at (s cos h, s sin h). Value is ignored.
double chord_distance(const ColorHSV& a, const ColorHSV& b);

/// 8-bit helpers used at I/O boundaries.
inline double from_byte(int byte) { return static_cast<double>(byte) / 255.0; }
inline int to_byte(double channel) {
  const double c = channel < 0.0 ? 0.0 : (channel > 1.0 ? 1.0 : channel);
  return static_cast<int>(c * 255.0 + 0.5);
}

}  // namespace dockvision
