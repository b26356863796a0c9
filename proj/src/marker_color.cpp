#include "dockvision/marker_color.hpp"

#include <algorithm>

#include "dockvision/error.hpp"

namespace dockvision {

std::string_view to_string(ColorPolicy policy) {
  switch (policy) {
    case ColorPolicy::kPureComplement: return "complement";
    case ColorPolicy::kPureTernary: return "ternary";
  }
  return "unknown";
}

ColorPolicy parse_policy(std::string_view name) {
  if (name == "complement" || name == "pure-complement" || name == "pure_complement")
    return ColorPolicy::kPureComplement;
  if (name == "ternary" || name == "pure-ternary" || name == "pure_ternary")
    return ColorPolicy::kPureTernary;
  throw ConfigError("unknown color policy '" + std::string(name) + "'");
}

ColorHSV select_marker_color(const ColorHSV& background, ColorPolicy policy) {
  return policy == ColorPolicy::kPureComplement ? pure_complement(background)
                                                : pure_ternary(background);
}

ColorRGB predict_sensed_color(const ColorRGB& bkg, const ColorRGB& mkr) {
  auto channel = [](double b, double m) { return std::max(b, 0.5 * (b + m)); };
  return {channel(bkg.r, mkr.r), channel(bkg.g, mkr.g), channel(bkg.b, mkr.b)};
}

MaskInterval mask_interval(const ColorHSV& sensed, double hue_halfwidth, double sv_halfwidth) {
  MaskInterval m;
  m.hue_center = wrap_hue(sensed.h);
  m.hue_halfwidth = hue_halfwidth;
  m.s_lo = std::clamp(sensed.s - sv_halfwidth, 0.0, 1.0);
  m.s_hi = std::clamp(sensed.s + sv_halfwidth, 0.0, 1.0);
  m.v_lo = std::clamp(sensed.v - sv_halfwidth, 0.0, 1.0);
  m.v_hi = std::clamp(sensed.v + sv_halfwidth, 0.0, 1.0);
  return m;
}

bool color_in_interval(const ColorHSV& c, const MaskInterval& m) {
  return hue_distance(c.h, m.hue_center) <= m.hue_halfwidth && c.s >= m.s_lo && c.s <= m.s_hi &&
         c.v >= m.v_lo && c.v <= m.v_hi;
}

ColorRGB apply_correction_offset(const ColorRGB& c, const ColorRGB& offset) {
  return clamp({c.r + offset.r, c.g + offset.g, c.b + offset.b});
}

}  // namespace dockvision
