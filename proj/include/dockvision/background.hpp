#pragma once

#include <array>
#include <deque>
#include <vector>

#include "dockvision/color.hpp"
#include "dockvision/image.hpp"

namespace dockvision {

inline constexpr int kIntensityBins = 5;
inline constexpr double kBinWidth = 51.0;

/// Separable Gaussian convolution per channel with clamp-to-edge borders.
/// The kernel spans [-radius, radius] and is normalized to unit sum.
Frame gaussian_blur(const Frame& frame, double sigma, int radius);

/// Normalized 1D Gaussian taps, length 2 * radius + 1.
std::vector<double> gaussian_kernel(double sigma, int radius);

/// BT.601 luma scaled to [0, 255].
Raster<double> to_greyscale(const Frame& frame);
double luma(const ColorRGB& c);

/// Bin index for a greyscale intensity: [0,51) -> 0, ..., [204,255] -> 4.
int intensity_bin(double intensity);

struct BinnedIntensities {
  Raster<std::uint8_t> labels;
  std::array<std::size_t, kIntensityBins> histogram{};
};

BinnedIntensities bin_intensities(const Raster<double>& grey);

struct BackgroundEstimate {
  Mask mask;               // 1 = background
  ColorHSV mean_color;
  double coverage = 0.0;   // fraction of pixels in mask, (0, 1]
  int modal_bin = 0;
};

/// Circular hue mean of unit phasors, arithmetic mean of s and v.
/// Returns a zero color for an empty input.
ColorHSV mean_color(std::span<const ColorHSV> colors);

/// Masks the most populated intensity bin (ties go to the darker bin) and
/// averages the frame's colors under it. Expects an already blurred frame.
BackgroundEstimate extract_background(const Frame& blurred);
/// Same, reusing an HSV conversion of the blurred frame.
BackgroundEstimate extract_background(const Frame& blurred, const Raster<ColorHSV>& hsv);

/// Time-windowed average of HSV colors. Samples older than the window
/// relative to the newest timestamp are evicted on every update.
class RollingColorAverage {
 public:
  explicit RollingColorAverage(double window_seconds = 2.0);

  /// Adds a sample and returns the current average. Timestamps must not
  /// decrease; a repeated timestamp replaces the newest sample.
  ColorHSV update(double timestamp, const ColorHSV& color);

  double window() const { return window_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  ColorHSV current() const;

 private:
  struct Sample {
    double timestamp;
    ColorHSV color;
  };

  double window_;
  std::deque<Sample> samples_;
};

}  // namespace dockvision
