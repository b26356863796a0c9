#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dockvision/background.hpp"
#include "dockvision/image.hpp"
#include "dockvision/marker_color.hpp"

namespace dockvision {

struct Blob {
  double cx = 0.0;        // centroid of the connected pass region
  double cy = 0.0;
  int area = 0;           // pass pixels in that region
  double response = 0.0;  // scale-normalized LoG peak
  double scale = 0.0;     // sigma at the peak
  int peak_x = 0;
  int peak_y = 0;
};

enum class Corner { kTopLeft = 0, kTopRight = 1, kBottomLeft = 2, kBottomRight = 3 };
inline constexpr std::array<Corner, 4> kCorners = {Corner::kTopLeft, Corner::kTopRight,
                                                   Corner::kBottomLeft, Corner::kBottomRight};
const char* corner_name(Corner c);

/// Physical marker rectangle. Corners live on the z = 0 plane of the
/// docking-station frame with x to the right and y down.
struct MarkerGeometry {
  double width = 0.89;
  double height = 0.127;

  double aspect() const { return width / height; }
  Eigen::Vector3d corner(Corner c) const;
  MarkerGeometry scaled(double factor) const { return {width * factor, height * factor}; }
};

struct LandmarkDetection {
  std::array<Blob, 4> corners;  // indexed by Corner
  double mask_pass_fraction = 0.0;

  const Blob& at(Corner c) const { return corners[static_cast<int>(c)]; }
};

struct ColorMaskResult {
  Mask pass;
  double pass_fraction = 0.0;
};

/// Foreground (not background) pixels whose HSV color lies in the interval.
ColorMaskResult apply_color_mask(const Frame& frame, const BackgroundEstimate& background,
                                 const MaskInterval& interval);

/// Plain color threshold over every pixel, no background subtraction.
ColorMaskResult color_threshold(const Frame& frame, const MaskInterval& interval);

/// Per-pixel HSV conversion, for callers that test several intervals.
Raster<ColorHSV> to_hsv(const Frame& frame);

/// Same as the two functions above on a pre-converted raster; a null
/// background means no background subtraction.
ColorMaskResult color_mask_hsv(const Raster<ColorHSV>& hsv, const Mask* background,
                               const MaskInterval& interval);

/// 8-connected components. Labels are 1-based in row-major discovery order;
/// 0 means unset.
struct Components {
  Raster<int> labels;
  std::vector<std::vector<std::size_t>> pixels;  // per component, row-major indices
};
Components connected_components(const Mask& mask);

/// Scale-normalized LoG response -sigma^2 * (LoG * mask) sampled from the
/// analytic kernel truncated at ceil(4 sigma). Zero outside the image.
int log_kernel_radius(double sigma);

/// One blob per connected pass region: the strongest scale-space local
/// maximum (over x, y and the sorted sigma list) lying on a pass pixel of
/// that region and exceeding min_response. Regions without one are dropped.
std::vector<Blob> log_blob_detect(const Mask& mask, std::span<const double> sigmas,
                                  double min_response);

std::vector<Blob> area_filter(std::span<const Blob> blobs, int min_area);

struct SpatialCandidate {
  std::array<std::size_t, 4> indices;  // ascending indices into the blob list
  double total_response = 0.0;
};

/// True when the triangle with the right angle at `apex` has an apex angle
/// within angle_tol of 90 degrees and a leg ratio within a factor ratio_tol
/// of `aspect`.
bool is_marker_triangle(const Eigen::Vector2d& apex, const Eigen::Vector2d& a,
                        const Eigen::Vector2d& b, double aspect, double ratio_tol,
                        double angle_tol_deg);

/// Four-blob sets made of two complementary right triangles sharing a
/// hypotenuse, i.e. a perspective view of the marker rectangle.
std::vector<SpatialCandidate> spatial_filter(std::span<const Blob> blobs,
                                             const MarkerGeometry& geometry, double ratio_tol,
                                             double angle_tol_deg);

/// Largest summed response, ties broken by lexicographic centroid order.
std::optional<SpatialCandidate> best_candidate(std::span<const SpatialCandidate> candidates,
                                               std::span<const Blob> blobs);

/// Labels four blobs TL/TR/BL/BR by image position; nullopt when the
/// layout violates the ordering invariants.
std::optional<LandmarkDetection> assign_correspondence(const std::array<Blob, 4>& blobs);

}  // namespace dockvision
