#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dockvision/background.hpp"
#include "dockvision/config.hpp"
#include "dockvision/detector.hpp"
#include "dockvision/marker_color.hpp"
#include "dockvision/pose.hpp"

namespace dockvision {

/// Stages shared by the docking station and the vehicle: blur, background
/// extraction, and the per-frame marker color.
struct PipelineHead {
  Frame blurred;
  BackgroundEstimate background;
  ColorHSV frame_marker_color;
};

PipelineHead run_pipeline_head(const Frame& frame, const PipelineConfig& config);

/// Docking-station side: keeps the rolling marker color and produces the
/// LED command.
class DockStationPipeline {
 public:
  struct Output {
    ColorHSV background;
    ColorHSV pure_background;
    ColorHSV frame_marker_color;
    ColorHSV marker_color;  // rolling average
    ColorRGB led_command;   // RGB with the correction offset applied
    double coverage = 0.0;
  };

  explicit DockStationPipeline(PipelineConfig config);
  Output process(const Frame& frame);

 private:
  PipelineConfig config_;
  RollingColorAverage rolling_;
};

struct LandmarkStage {
  std::vector<Blob> blobs;  // LoG blobs that passed the area filter
  std::size_t candidate_count = 0;
  std::optional<LandmarkDetection> detection;
};

/// LoG blobs, area filter, spatial filter and correspondence on a pass mask.
LandmarkStage detect_landmarks(const Mask& pass, double pass_fraction, const PipelineConfig& config);

struct FrameResult {
  double timestamp = 0.0;
  ColorHSV background_color;
  ColorHSV pure_background;
  double background_coverage = 0.0;
  int modal_bin = 0;
  ColorHSV frame_marker_color;
  ColorHSV marker_color;  // rolling average used for masking
  ColorHSV predicted_sensed;
  MaskInterval interval;
  ColorMaskResult mask;
  LandmarkStage landmarks;
  std::optional<ScenePose> pose;
  std::string pose_error;
};

/// Vehicle side: full detection pipeline with its own rolling average.
class AuvPipeline {
 public:
  explicit AuvPipeline(PipelineConfig config);
  FrameResult process(const Frame& frame);

  const PipelineConfig& config() const { return config_; }

 private:
  PipelineConfig config_;
  RollingColorAverage rolling_;
};

/// Sensed marker color predicted from the background and marker colors.
ColorHSV predict_sensed_hsv(const ColorHSV& background, const ColorHSV& marker);

nlohmann::json to_json(const FrameResult& result);
nlohmann::json to_json(const MaskInterval& interval);
nlohmann::json to_json(const Blob& blob);

}  // namespace dockvision
