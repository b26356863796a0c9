#include "dockvision/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "dockvision/error.hpp"

namespace dockvision {

using nlohmann::json;

PipelineHead run_pipeline_head(const Frame& frame, const PipelineConfig& config) {
  PipelineHead head;
  head.blurred = gaussian_blur(frame, config.blur_sigma, config.blur_radius);
  head.background = extract_background(head.blurred);
  head.frame_marker_color = select_marker_color(head.background.mean_color, config.policy);
  return head;
}

DockStationPipeline::DockStationPipeline(PipelineConfig config)
    : config_(std::move(config)), rolling_(config_.rolling_window_s) {}

DockStationPipeline::Output DockStationPipeline::process(const Frame& frame) {
  const auto head = run_pipeline_head(frame, config_);
  Output out;
  out.background = head.background.mean_color;
  out.pure_background = pure(out.background);
  out.frame_marker_color = head.frame_marker_color;
  out.marker_color = rolling_.update(frame.timestamp, head.frame_marker_color);
  out.led_command = apply_correction_offset(hsv_to_rgb(out.marker_color), config_.color_correction_offset);
  out.coverage = head.background.coverage;
  return out;
}

ColorHSV predict_sensed_hsv(const ColorHSV& background, const ColorHSV& marker) {
  return rgb_to_hsv(predict_sensed_color(hsv_to_rgb(background), hsv_to_rgb(marker)));
}

LandmarkStage detect_landmarks(const Mask& pass, double pass_fraction, const PipelineConfig& config) {
  LandmarkStage stage;
  const auto raw = log_blob_detect(pass, config.log_sigmas, config.log_min_response);
  stage.blobs = area_filter(raw, config.min_area);

  std::vector<Blob> strongest = stage.blobs;
  if (strongest.size() > static_cast<std::size_t>(config.max_blobs)) {
    std::vector<std::size_t> order(strongest.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return stage.blobs[a].response > stage.blobs[b].response;
    });
    order.resize(config.max_blobs);
    std::sort(order.begin(), order.end());
    strongest.clear();
    for (auto i : order) strongest.push_back(stage.blobs[i]);
  }

  const auto candidates = spatial_filter(strongest, config.geometry, config.ratio_tol, config.angle_tol_deg);
  stage.candidate_count = candidates.size();
  const auto best = best_candidate(candidates, strongest);
  if (best) {
    std::array<Blob, 4> four;
    for (int i = 0; i < 4; ++i) four[i] = strongest[best->indices[i]];
    stage.detection = assign_correspondence(four);
    if (stage.detection) stage.detection->mask_pass_fraction = pass_fraction;
  }
  return stage;
}

AuvPipeline::AuvPipeline(PipelineConfig config)
    : config_(std::move(config)), rolling_(config_.rolling_window_s) {}

FrameResult AuvPipeline::process(const Frame& frame) {
  const auto head = run_pipeline_head(frame, config_);
  FrameResult r;
  r.timestamp = frame.timestamp;
  r.background_color = head.background.mean_color;
  r.pure_background = pure(r.background_color);
  r.background_coverage = head.background.coverage;
  r.modal_bin = head.background.modal_bin;
  r.frame_marker_color = head.frame_marker_color;
  r.marker_color = rolling_.update(frame.timestamp, head.frame_marker_color);
  r.predicted_sensed = predict_sensed_hsv(r.background_color, r.marker_color);
  r.interval = mask_interval(r.predicted_sensed, config_.hue_halfwidth_deg, config_.sv_halfwidth);
  r.mask = apply_color_mask(head.blurred, head.background, r.interval);
  r.landmarks = detect_landmarks(r.mask.pass, r.mask.pass_fraction, config_);
  if (r.landmarks.detection) {
    try {
      r.pose = solve_pnp(*r.landmarks.detection, config_.geometry, config_.intrinsics);
    } catch (const PoseError& e) {
      r.pose_error = e.what();
    }
  }
  return r;
}

json to_json(const MaskInterval& m) {
  return {{"hue_center", fixed(m.hue_center)}, {"hue_halfwidth", fixed(m.hue_halfwidth)},
          {"s", {fixed(m.s_lo), fixed(m.s_hi)}}, {"v", {fixed(m.v_lo), fixed(m.v_hi)}}};
}

json to_json(const Blob& b) {
  return {{"cx", fixed(b.cx, 4)},       {"cy", fixed(b.cy, 4)},
          {"area", b.area},             {"response", fixed(b.response)},
          {"scale", fixed(b.scale, 4)}, {"peak", {b.peak_x, b.peak_y}}};
}

json to_json(const FrameResult& r) {
  json blobs = json::array();
  for (const auto& b : r.landmarks.blobs) blobs.push_back(to_json(b));

  json detection = nullptr;
  if (r.landmarks.detection) {
    detection = json::object();
    for (Corner c : kCorners) {
      const Blob& b = r.landmarks.detection->at(c);
      detection[corner_name(c)] = {fixed(b.cx, 4), fixed(b.cy, 4)};
    }
  }
  json pose = nullptr;
  if (r.pose) pose = to_json(*r.pose);

  json out = {
      {"timestamp", fixed(r.timestamp)},
      {"background", {{"color", to_json(r.background_color)},
                      {"pure", to_json(r.pure_background)},
                      {"coverage", fixed(r.background_coverage)},
                      {"modal_bin", r.modal_bin}}},
      {"marker_color", to_json(r.marker_color)},
      {"predicted_sensed", to_json(r.predicted_sensed)},
      {"mask_interval", to_json(r.interval)},
      {"mask_pass_fraction", fixed(r.mask.pass_fraction, 8)},
      {"blobs", blobs},
      {"spatial_candidates", r.landmarks.candidate_count},
      {"detection", detection},
      {"pose", pose},
  };
  if (!r.pose_error.empty()) out["pose_error"] = r.pose_error;
  return out;
}

}  // namespace dockvision
