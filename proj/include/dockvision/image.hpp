#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "dockvision/color.hpp"

namespace dockvision {

/// Row-major single-channel raster.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(checked_size(width, height), fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }
  const T& operator()(int x, int y) const {
    assert(x >= 0 && x < width_ && y >= 0 && y < height_);
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("raster dimensions must be positive");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Binary mask; uint8_t rather than bool so pixels() can hand out a span.
using Mask = Raster<std::uint8_t>;

/// A decoded RGB raster plus capture time in seconds.
struct Frame {
  Raster<ColorRGB> image;
  double timestamp = 0.0;

  int width() const { return image.width(); }
  int height() const { return image.height(); }

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline std::size_t popcount(const Mask& m) {
  std::size_t n = 0;
  for (auto p : m.pixels()) n += p != 0;
  return n;
}

}  // namespace dockvision
