#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dockvision/color.hpp"
#include "dockvision/detector.hpp"
#include "dockvision/marker_color.hpp"
#include "dockvision/pose.hpp"
#include "dockvision/simulator.hpp"

namespace dockvision {

/// Every tunable of the detection pipeline. Defaults are the documented
/// values; from_json accepts partial documents and fills in the rest.
struct PipelineConfig {
  ColorPolicy policy = ColorPolicy::kPureTernary;
  double blur_sigma = 2.0;
  int blur_radius = 5;
  double rolling_window_s = 2.0;
  double frame_rate_hz = 10.0;  // timestamps for image sequences
  double hue_halfwidth_deg = kDefaultHueHalfwidth;
  double sv_halfwidth = kDefaultSvHalfwidth;
  std::vector<double> log_sigmas{1.0, 2.0, 3.0, 4.0, 6.0, 8.0};
  double log_min_response = 0.2;
  int min_area = 9;
  int max_blobs = 64;  // strongest blobs kept for the spatial filter
  double ratio_tol = 1.5;
  double angle_tol_deg = 15.0;
  MarkerGeometry geometry{};
  CameraIntrinsics intrinsics{};
  ColorRGB color_correction_offset{0.0, 0.0, 0.0};

  /// Throws ConfigError naming the first out-of-range field.
  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

nlohmann::json to_json(const SceneSpec& spec);
/// Fields missing from the document keep the SceneSpec defaults.
SceneSpec scene_spec_from_json(const nlohmann::json& doc, SceneSpec base = {});

nlohmann::json to_json(const ScenePose& pose);
nlohmann::json to_json(const GroundTruth& truth);
nlohmann::json to_json(const ColorHSV& c);
nlohmann::json to_json(const ColorRGB& c);

/// Reads a JSON document; ConfigError on missing file or parse failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Rounds to a fixed number of decimals so serialized output is byte-stable.
double fixed(double value, int decimals = 6);

}  // namespace dockvision
