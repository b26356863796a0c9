#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "dockvision/color.hpp"
#include "dockvision/detector.hpp"
#include "dockvision/image.hpp"
#include "dockvision/marker_color.hpp"
#include "dockvision/pose.hpp"

namespace dockvision {

/// Linear HSV drift down the image rows: the top row is offset by -span/2
/// and the bottom row by +span/2 from the nominal background color.
struct BackgroundGradient {
  double hue_span = 0.0;  // degrees
  double saturation_span = 0.0;
  double value_span = 0.0;
};

/// Opaque foreground object painted over the background (docking-station
/// parts, buoys, debris). Geometry is in pixels.
struct Distractor {
  enum class Shape { kDisk, kRectangle };
  Shape shape = Shape::kDisk;
  ColorRGB color;
  double cx = 0.0;
  double cy = 0.0;
  double half_width = 1.0;   // disk radius for kDisk
  double half_height = 1.0;  // ignored for kDisk
};

/// Orange buoy preset (hue 30, s 0.9, v 0.9).
Distractor orange_buoy(double cx, double cy, double radius);

struct SceneSpec {
  int width = 640;
  int height = 480;
  ColorHSV background_color{200.0, 0.5, 0.45};
  BackgroundGradient background_gradient{120.0, 0.0, 0.3};
  ScenePose marker_pose{};
  MarkerGeometry geometry{};
  bool markers_visible = true;
  ColorRGB marker_emit_color{0.0, 0.0, 0.0};
  double marker_radius = 0.03;        // meters
  double halo_sigma_factor = 0.5;     // halo falloff sigma / marker pixel radius
  double halo_extent_factor = 2.0;    // halo outer radius / marker pixel radius
  std::vector<Distractor> distractors;
  double noise_sigma = 2.0 / 255.0;
  CameraIntrinsics intrinsics{};
  std::uint64_t seed = 1;
  double timestamp = 0.0;

  SceneSpec();
};

struct GroundTruth {
  CornerPixels corners{};
  std::array<bool, 4> visible{};
  std::array<double, 4> pixel_radius{};
  /// Row-major indices of the pre-noise marker disk pixels, per corner.
  std::array<std::vector<std::size_t>, 4> marker_pixels;
  ScenePose pose;
  ColorHSV background_mean;
};

/// Standard normal deviates: 64-bit Mersenne Twister feeding Boost.Random's
/// ziggurat normal_distribution. Both are fully specified algorithms, so a
/// seed gives the same stream on every platform.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}
  double normal() { return normal_(engine_); }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

/// Background color of a given image row before markers and noise.
ColorRGB background_at_row(const SceneSpec& spec, int row);

/// Renders background (back-scatter), distractors, marker disks with the
/// sensed emitter color and a Gaussian forward-scatter halo, then adds
/// seeded per-channel noise and quantizes to 8 bits.
std::pair<Frame, GroundTruth> render(const SceneSpec& spec);

/// One scene per hue; seed = base seed + index.
std::vector<std::pair<Frame, GroundTruth>> sweep_backgrounds(const SceneSpec& base,
                                                             const std::vector<double>& hues);

/// Frame A shows the markers (vehicle view), frame B only the background
/// (docking-station view). Each frame uses its own noise seed.
std::pair<Frame, Frame> render_dual_view(const SceneSpec& spec, std::uint64_t seed_a,
                                         std::uint64_t seed_b);

/// Frontal pose (identity rotation) with the marker centre at (x, y, depth).
ScenePose frontal_pose(double depth, double x = 0.0, double y = 0.0);

}  // namespace dockvision
