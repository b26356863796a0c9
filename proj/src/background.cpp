#include "dockvision/background.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dockvision {

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0)) throw std::invalid_argument("blur sigma must be positive");
  if (radius < 1) throw std::invalid_argument("blur radius must be at least 1");
  std::vector<double> taps(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    taps[i + radius] = w;
    sum += w;
  }
  for (auto& w : taps) w /= sum;
  return taps;
}

Frame gaussian_blur(const Frame& frame, double sigma, int radius) {
  const auto taps = gaussian_kernel(sigma, radius);
  const int w = frame.width();
  const int h = frame.height();
  const int n_taps = 2 * radius + 1;
  // ColorRGB is three packed doubles, so rows are treated as flat arrays.
  static_assert(sizeof(ColorRGB) == 3 * sizeof(double));
  const std::size_t row_len = 3 * static_cast<std::size_t>(w);

  auto horizontal = [&](int y, double* dst) {
    std::fill(dst, dst + row_len, 0.0);
    const ColorRGB* in = &frame.image(0, y);
    // Interior pixels as a flat multiply-add over the interleaved row.
    if (w > 2 * radius) {
      const double* src = reinterpret_cast<const double*>(in);
      const std::size_t lo = 3 * static_cast<std::size_t>(radius);
      const std::size_t hi = row_len - lo;
      for (int k = -radius; k <= radius; ++k) {
        const double t = taps[k + radius];
        const double* shifted = src + 3 * k;
        for (std::size_t i = lo; i < hi; ++i) dst[i] += t * shifted[i];
      }
    }
    for (int x = 0; x < w; ++x) {
      if (x >= radius && x + radius < w) continue;
      double r = 0.0, g = 0.0, b = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        const ColorRGB& p = in[std::clamp(x + k, 0, w - 1)];
        const double t = taps[k + radius];
        r += t * p.r;
        g += t * p.g;
        b += t * p.b;
      }
      dst[3 * x] = r;
      dst[3 * x + 1] = g;
      dst[3 * x + 2] = b;
    }
  };

  // Horizontally blurred rows live in a ring of n_taps slots so the
  // vertical pass reads from cache instead of a full intermediate image.
  std::vector<double> ring(row_len * n_taps);
  std::vector<int> ring_row(n_taps, -1);
  auto blurred_row = [&](int y) -> const double* {
    const int slot = y % n_taps;
    double* row = ring.data() + static_cast<std::size_t>(slot) * row_len;
    if (ring_row[slot] != y) {
      horizontal(y, row);
      ring_row[slot] = y;
    }
    return row;
  };

  Frame out{Raster<ColorRGB>(w, h), frame.timestamp};
  for (int y = 0; y < h; ++y) {
    double* dst = reinterpret_cast<double*>(&out.image(0, y));
    for (int k = -radius; k <= radius; ++k) {
      const double* src = blurred_row(std::clamp(y + k, 0, h - 1));
      const double t = taps[k + radius];
      for (std::size_t i = 0; i < row_len; ++i) dst[i] += t * src[i];
    }
  }
  return out;
}

double luma(const ColorRGB& c) { return 255.0 * (0.299 * c.r + 0.587 * c.g + 0.114 * c.b); }

Raster<double> to_greyscale(const Frame& frame) {
  Raster<double> grey(frame.width(), frame.height());
  auto src = frame.image.pixels();
  auto dst = grey.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = luma(src[i]);
  return grey;
}

int intensity_bin(double intensity) {
  if (!(intensity > 0.0)) return 0;
  const int bin = static_cast<int>(std::floor(intensity / kBinWidth));
  return std::min(bin, kIntensityBins - 1);
}

BinnedIntensities bin_intensities(const Raster<double>& grey) {
  BinnedIntensities out{Raster<std::uint8_t>(grey.width(), grey.height()), {}};
  auto src = grey.pixels();
  auto dst = out.labels.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const int bin = intensity_bin(src[i]);
    dst[i] = static_cast<std::uint8_t>(bin);
    ++out.histogram[bin];
  }
  return out;
}

namespace {

constexpr double kRad = std::numbers::pi / 180.0;

// cos and sin of whole degrees, then an angle-sum step with short series
// for the remaining half degree. Within a few ulp of std::cos/std::sin and
// several times faster, which matters at one call per background pixel.
struct DegreeTable {
  std::array<double, 361> cos{}, sin{};
  DegreeTable() {
    for (int i = 0; i <= 360; ++i) {
      cos[i] = std::cos(i * kRad);
      sin[i] = std::sin(i * kRad);
    }
  }
};

void unit_vector(double hue_deg, double& c, double& s) {
  static const DegreeTable table;
  const double h = wrap_hue(hue_deg);
  const int n = static_cast<int>(h + 0.5);
  const double d = (h - n) * kRad;
  const double d2 = d * d;
  const double cd = 1.0 - d2 / 2.0 * (1.0 - d2 / 12.0 * (1.0 - d2 / 30.0));
  const double sd = d * (1.0 - d2 / 6.0 * (1.0 - d2 / 20.0 * (1.0 - d2 / 42.0)));
  c = table.cos[n] * cd - table.sin[n] * sd;
  s = table.sin[n] * cd + table.cos[n] * sd;
}

class ColorAccumulator {
 public:
  void add(const ColorHSV& c) {
    double ux, uy;
    unit_vector(c.h, ux, uy);
    cx_ += ux;
    cy_ += uy;
    s_ += c.s;
    v_ += c.v;
    ++n_;
  }

  ColorHSV mean() const {
    if (n_ == 0) return {};
    const double n = static_cast<double>(n_);
    // Opposing hues cancel; the hue of a zero resultant falls back to 0.
    const double hue = std::hypot(cx_, cy_) <= 1e-12 * n
                           ? 0.0
                           : wrap_hue(std::atan2(cy_, cx_) * 180.0 / std::numbers::pi);
    return {hue, s_ / n, v_ / n};
  }

  std::size_t count() const { return n_; }

 private:
  double cx_ = 0.0, cy_ = 0.0, s_ = 0.0, v_ = 0.0;
  std::size_t n_ = 0;
};

}  // namespace

ColorHSV mean_color(std::span<const ColorHSV> colors) {
  ColorAccumulator acc;
  for (const auto& c : colors) acc.add(c);
  return acc.mean();
}

namespace {

template <typename HsvAt>
BackgroundEstimate extract_impl(const Frame& blurred, HsvAt hsv_at) {
  auto rgb = blurred.image.pixels();
  Raster<std::uint8_t> labels_raster(blurred.width(), blurred.height());
  auto labels = labels_raster.pixels();
  std::array<std::size_t, kIntensityBins> hist{};
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const int bin = intensity_bin(luma(rgb[i]));
    labels[i] = static_cast<std::uint8_t>(bin);
    ++hist[bin];
  }
  // max_element returns the first maximum, i.e. the darker bin on ties.
  const int modal = static_cast<int>(std::max_element(hist.begin(), hist.end()) - hist.begin());

  BackgroundEstimate est{Mask(blurred.width(), blurred.height()), {}, 0.0, modal};
  ColorAccumulator acc;
  auto mask = est.mask.pixels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == modal) {
      mask[i] = 1;
      acc.add(hsv_at(i));
    }
  }
  est.mean_color = acc.mean();
  est.coverage = static_cast<double>(acc.count()) / static_cast<double>(labels.size());
  return est;
}

}  // namespace

BackgroundEstimate extract_background(const Frame& blurred) {
  auto pixels = blurred.image.pixels();
  return extract_impl(blurred, [&](std::size_t i) { return rgb_to_hsv(pixels[i]); });
}

BackgroundEstimate extract_background(const Frame& blurred, const Raster<ColorHSV>& hsv) {
  if (hsv.width() != blurred.width() || hsv.height() != blurred.height())
    throw std::invalid_argument("HSV raster does not match frame dimensions");
  auto pixels = hsv.pixels();
  return extract_impl(blurred, [&](std::size_t i) { return pixels[i]; });
}

RollingColorAverage::RollingColorAverage(double window_seconds) : window_(window_seconds) {
  if (!(window_seconds > 0.0)) throw std::invalid_argument("rolling window must be positive");
}

ColorHSV RollingColorAverage::update(double timestamp, const ColorHSV& color) {
  if (!samples_.empty()) {
    const double newest = samples_.back().timestamp;
    if (timestamp < newest) throw std::invalid_argument("rolling average timestamps must not decrease");
    if (timestamp == newest) samples_.pop_back();
  }
  samples_.push_back({timestamp, normalize(color)});
  while (timestamp - samples_.front().timestamp > window_) samples_.pop_front();
  return current();
}

ColorHSV RollingColorAverage::current() const {
  std::vector<ColorHSV> colors;
  colors.reserve(samples_.size());
  for (const auto& s : samples_) colors.push_back(s.color);
  return mean_color(colors);
}

}  // namespace dockvision
