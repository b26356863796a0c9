#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "dockvision/detector.hpp"
#include "dockvision/image.hpp"

namespace dockvision {

/// Decodes PNG/PPM (anything OpenCV reads) into an RGB frame. Throws
/// ImageIoError naming the file.
Frame read_frame(const std::filesystem::path& path, double timestamp = 0.0);

/// Writes an 8-bit RGB PNG.
void write_png(const std::filesystem::path& path, const Frame& frame);

/// Side-by-side view: the frame on the left, the masked frame on the
/// right. Blobs in the detection get green circles, other blobs red.
void write_overlay(const std::filesystem::path& path, const Frame& frame, const Mask& pass,
                   std::span<const Blob> blobs, const std::optional<LandmarkDetection>& detection);

}  // namespace dockvision
