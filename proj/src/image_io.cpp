#include "dockvision/image_io.hpp"

#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "dockvision/error.hpp"

namespace dockvision {

namespace {

cv::Mat to_bgr(const Frame& frame) {
  cv::Mat m(frame.height(), frame.width(), CV_8UC3);
  for (int y = 0; y < frame.height(); ++y) {
    auto* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < frame.width(); ++x) {
      const ColorRGB& c = frame.image(x, y);
      row[x] = cv::Vec3b(static_cast<uchar>(to_byte(c.b)), static_cast<uchar>(to_byte(c.g)),
                         static_cast<uchar>(to_byte(c.r)));
    }
  }
  return m;
}

}  // namespace

Frame read_frame(const std::filesystem::path& path, double timestamp) {
  if (!std::filesystem::exists(path)) throw ImageIoError("image not found: " + path.string());
  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw ImageIoError("cannot decode image " + path.string() + ": " + e.what());
  }
  if (m.empty() || m.depth() != CV_8U) throw ImageIoError("cannot decode image " + path.string());
  Frame f{Raster<ColorRGB>(m.cols, m.rows), timestamp};
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<cv::Vec3b>(y);
    for (int x = 0; x < m.cols; ++x)
      f.image(x, y) = {from_byte(row[x][2]), from_byte(row[x][1]), from_byte(row[x][0])};
  }
  return f;
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), to_bgr(frame));
  } catch (const cv::Exception& e) {
    throw ImageIoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw ImageIoError("cannot write " + path.string());
}

void write_overlay(const std::filesystem::path& path, const Frame& frame, const Mask& pass,
                   std::span<const Blob> blobs, const std::optional<LandmarkDetection>& detection) {
  const cv::Mat raw = to_bgr(frame);
  cv::Mat masked = cv::Mat::zeros(raw.size(), raw.type());
  for (int y = 0; y < raw.rows; ++y)
    for (int x = 0; x < raw.cols; ++x)
      if (pass(x, y)) masked.at<cv::Vec3b>(y, x) = raw.at<cv::Vec3b>(y, x);

  auto in_detection = [&](const Blob& b) {
    if (!detection) return false;
    for (const auto& c : detection->corners)
      if (c.cx == b.cx && c.cy == b.cy) return true;
    return false;
  };
  for (const auto& b : blobs) {
    const cv::Scalar color = in_detection(b) ? cv::Scalar(0, 255, 0) : cv::Scalar(0, 0, 255);
    const cv::Point center(static_cast<int>(std::lround(b.cx)), static_cast<int>(std::lround(b.cy)));
    const int radius = std::max(3, static_cast<int>(std::lround(b.scale * std::sqrt(2.0))) + 2);
    cv::circle(raw, center, radius, color, 1, cv::LINE_8);
    cv::circle(masked, center, radius, color, 1, cv::LINE_8);
  }
  cv::Mat both;
  cv::hconcat(raw, masked, both);
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), both);
  } catch (const cv::Exception& e) {
    throw ImageIoError("cannot write " + path.string() + ": " + e.what());
  }
  if (!ok) throw ImageIoError("cannot write " + path.string());
}

}  // namespace dockvision
