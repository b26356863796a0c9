#pragma once

#include <string>
#include <string_view>

#include "dockvision/color.hpp"

namespace dockvision {

enum class ColorPolicy { kPureComplement, kPureTernary };

std::string_view to_string(ColorPolicy policy);
/// Accepts "complement" / "ternary" (and the "pure-" prefixed forms).
ColorPolicy parse_policy(std::string_view name);

inline constexpr double kDefaultHueHalfwidth = 60.0;
inline constexpr double kDefaultSvHalfwidth = 0.1765;

/// Closed HSV box; the hue window wraps modulo 360.
struct MaskInterval {
  double hue_center = 0.0;
  double hue_halfwidth = kDefaultHueHalfwidth;
  double s_lo = 0.0, s_hi = 1.0;
  double v_lo = 0.0, v_hi = 1.0;
};

ColorHSV select_marker_color(const ColorHSV& background, ColorPolicy policy);

/// Per channel max(bkg, (bkg + mkr) / 2): what the camera sees of an
/// emitter over a background it cannot darken.
ColorRGB predict_sensed_color(const ColorRGB& background, const ColorRGB& marker);

MaskInterval mask_interval(const ColorHSV& sensed, double hue_halfwidth = kDefaultHueHalfwidth,
                           double sv_halfwidth = kDefaultSvHalfwidth);

bool color_in_interval(const ColorHSV& c, const MaskInterval& m);

/// Adds the fixed per-channel LED correction and clamps to [0, 1].
ColorRGB apply_correction_offset(const ColorRGB& c, const ColorRGB& offset);

}  // namespace dockvision
