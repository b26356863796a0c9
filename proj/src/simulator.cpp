#include "dockvision/simulator.hpp"

#include <algorithm>
#include <cmath>

namespace dockvision {

Distractor orange_buoy(double cx, double cy, double radius) {
  return {Distractor::Shape::kDisk, hsv_to_rgb({30.0, 0.9, 0.9}), cx, cy, radius, radius};
}

ScenePose frontal_pose(double depth, double x, double y) {
  ScenePose p;
  p.rotation = Eigen::Matrix3d::Identity();
  p.translation = {x, y, depth};
  return p;
}

SceneSpec::SceneSpec()
    : marker_pose(frontal_pose(3.0)),
      marker_emit_color(hsv_to_rgb(pure_ternary(background_color))) {}

ColorRGB background_at_row(const SceneSpec& spec, int row) {
  const double t = spec.height > 1 ? static_cast<double>(row) / (spec.height - 1) - 0.5 : 0.0;
  const auto& g = spec.background_gradient;
  const ColorHSV c{spec.background_color.h + t * g.hue_span,
                   spec.background_color.s + t * g.saturation_span,
                   spec.background_color.v + t * g.value_span};
  return hsv_to_rgb(normalize(c));
}

namespace {

void paint_distractor_row(Raster<ColorRGB>& img, const Distractor& d, int y) {
  const double hh = d.shape == Distractor::Shape::kDisk ? d.half_width : d.half_height;
  if (y < std::floor(d.cy - hh) || y > std::ceil(d.cy + hh)) return;
  const int x0 = std::max(0, static_cast<int>(std::floor(d.cx - d.half_width)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(d.cx + d.half_width)));
  const double dy = y - d.cy;
  for (int x = x0; x <= x1; ++x) {
    const double dx = x - d.cx;
    const bool inside = d.shape == Distractor::Shape::kDisk
                            ? dx * dx + dy * dy <= d.half_width * d.half_width
                            : std::fabs(dx) <= d.half_width && std::fabs(dy) <= d.half_height;
    if (inside) img(x, y) = clamp(d.color);
  }
}

struct MarkerDisk {
  Eigen::Vector2d uv;
  double radius = 0.0;
  double outer = 0.0;
  double halo_sigma = 0.0;
  int x0 = 0, x1 = -1, y0 = 0, y1 = -1;
};

}  // namespace

std::pair<Frame, GroundTruth> render(const SceneSpec& spec) {
  Frame frame{Raster<ColorRGB>(spec.width, spec.height), spec.timestamp};
  auto& img = frame.image;

  GroundTruth truth;
  truth.pose = spec.marker_pose;
  truth.background_mean = normalize(spec.background_color);

  std::array<MarkerDisk, 4> disks{};
  for (Corner c : kCorners) {
    const int i = static_cast<int>(c);
    const Eigen::Vector3d cam = spec.marker_pose.rotation * spec.geometry.corner(c) +
                                spec.marker_pose.translation;
    truth.visible[i] = false;
    if (!(cam.z() > 0.0)) {
      truth.corners[i] = {std::nan(""), std::nan("")};
      continue;
    }
    const Eigen::Vector2d uv = project(spec.geometry.corner(c), spec.marker_pose, spec.intrinsics);
    truth.corners[i] = uv;
    truth.visible[i] = uv.x() >= 0.0 && uv.y() >= 0.0 && uv.x() <= spec.width - 1 &&
                       uv.y() <= spec.height - 1;
    const double radius = spec.intrinsics.fx * spec.marker_radius / cam.z();
    truth.pixel_radius[i] = radius;
    if (!spec.markers_visible) continue;

    MarkerDisk& d = disks[i];
    d.uv = uv;
    d.radius = radius;
    d.outer = radius * std::max(1.0, spec.halo_extent_factor);
    d.halo_sigma = std::max(1e-9, spec.halo_sigma_factor * radius);
    d.x0 = std::max(0, static_cast<int>(std::floor(uv.x() - d.outer)));
    d.x1 = std::min(spec.width - 1, static_cast<int>(std::ceil(uv.x() + d.outer)));
    d.y0 = std::max(0, static_cast<int>(std::floor(uv.y() - d.outer)));
    d.y1 = std::min(spec.height - 1, static_cast<int>(std::ceil(uv.y() + d.outer)));
  }

  // Row by row: background, distractors, markers, then noise and 8-bit
  // quantization while the row is still in cache.
  NoiseSource noise(spec.seed);
  const bool noisy = spec.noise_sigma > 0.0;
  for (int y = 0; y < spec.height; ++y) {
    const ColorRGB row = background_at_row(spec, y);
    for (int x = 0; x < spec.width; ++x) img(x, y) = row;
    for (const auto& d : spec.distractors) paint_distractor_row(img, d, y);

    for (int i = 0; i < 4; ++i) {
      const MarkerDisk& m = disks[i];
      if (y < m.y0 || y > m.y1) continue;
      for (int x = m.x0; x <= m.x1; ++x) {
        const double d = std::hypot(x - m.uv.x(), y - m.uv.y());
        if (d > m.outer) continue;
        ColorRGB& px = img(x, y);
        const ColorRGB sensed = predict_sensed_color(px, spec.marker_emit_color);
        if (d <= m.radius) {
          px = sensed;
          truth.marker_pixels[i].push_back(static_cast<std::size_t>(y) * spec.width + x);
        } else {
          const double e = (d - m.radius) / m.halo_sigma;
          const double w = std::exp(-0.5 * e * e);
          px = {px.r + w * (sensed.r - px.r), px.g + w * (sensed.g - px.g),
                px.b + w * (sensed.b - px.b)};
        }
      }
    }

    for (int x = 0; x < spec.width; ++x) {
      ColorRGB& px = img(x, y);
      if (noisy) {
        px.r += spec.noise_sigma * noise.normal();
        px.g += spec.noise_sigma * noise.normal();
        px.b += spec.noise_sigma * noise.normal();
      }
      px = {from_byte(to_byte(px.r)), from_byte(to_byte(px.g)), from_byte(to_byte(px.b))};
    }
  }
  return {std::move(frame), std::move(truth)};
}

std::vector<std::pair<Frame, GroundTruth>> sweep_backgrounds(const SceneSpec& base,
                                                             const std::vector<double>& hues) {
  std::vector<std::pair<Frame, GroundTruth>> out;
  out.reserve(hues.size());
  for (std::size_t i = 0; i < hues.size(); ++i) {
    SceneSpec spec = base;
    spec.background_color.h = wrap_hue(hues[i]);
    spec.seed = base.seed + i;
    out.push_back(render(spec));
  }
  return out;
}

std::pair<Frame, Frame> render_dual_view(const SceneSpec& spec, std::uint64_t seed_a,
                                         std::uint64_t seed_b) {
  SceneSpec a = spec;
  a.seed = seed_a;
  SceneSpec b = spec;
  b.seed = seed_b;
  b.markers_visible = false;
  b.distractors.clear();
  return {render(a).first, render(b).first};
}

}  // namespace dockvision
