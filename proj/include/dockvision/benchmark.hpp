#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dockvision/config.hpp"
#include "dockvision/simulator.hpp"

namespace dockvision {

enum class DetectionMode { kNone, kAdaptive, kAll };

/// A background-hue sweep. Scene ids run hue-major: id = hue_index *
/// frames_per_hue + frame, and each frame is rendered with seed
/// scene.seed + id.
struct SweepSpec {
  std::vector<double> hues{0, 30, 60, 90, 120, 150, 180, 210, 240, 270, 300, 330};
  int frames_per_hue = 500;
  std::vector<double> static_tuned_hues{0.0, 180.0};
  ColorPolicy marker_policy = ColorPolicy::kPureTernary;
  DetectionMode detection = DetectionMode::kAdaptive;
  int threads = 0;  // 0 = hardware concurrency
  SceneSpec scene{};

  void validate() const;
};

/// Throws ConfigError before anything is rendered.
SweepSpec sweep_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SweepSpec& sweep);

struct FilterKind {
  enum class Type { kAdaptiveTernary, kAdaptiveComplement, kStatic };
  Type type = Type::kAdaptiveTernary;
  double tuned_hue = 0.0;

  std::string name() const;
};

struct BenchmarkRecord {
  std::size_t scene_id = 0;
  double hue = 0.0;
  int frame = 0;
  std::string filter;
  double mask_pass_fraction = 0.0;
  std::optional<bool> detected;  // empty when detection was not run
  std::optional<double> corner_error_px;
  std::optional<double> pose_translation_error_m;
  std::optional<double> pose_rotation_error_deg;
};

struct FilterSummary {
  std::string filter;
  std::size_t frames = 0;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
  std::size_t detection_evaluated = 0;
  std::size_t detected = 0;
};

struct BenchmarkResult {
  std::vector<BenchmarkRecord> records;  // ordered by scene id, then filter
  std::vector<FilterSummary> summary;
};

/// Static baseline: the mask interval of the marker color sensed over the
/// nominal background at the tuned hue.
MaskInterval static_interval(const SceneSpec& scene, double tuned_hue, ColorPolicy marker_policy,
                             const PipelineConfig& config);

/// Marker color the docking station settles on for one sweep hue, from its
/// own background-only view.
ColorHSV station_marker_color(const SceneSpec& scene, std::size_t hue_index, ColorPolicy policy,
                              const PipelineConfig& config);

BenchmarkResult run_benchmark(const SweepSpec& sweep, const PipelineConfig& config);

/// Linear-interpolated quantile of unsorted data (q in [0, 1]).
double quantile(std::vector<double> values, double q);

std::vector<FilterSummary> summarize(const std::vector<BenchmarkRecord>& records);
nlohmann::json to_json(const std::vector<FilterSummary>& summary);

inline constexpr const char* kCsvHeader =
    "scene_id,hue_deg,frame,filter,mask_pass_fraction,detected,corner_error_px,"
    "pose_translation_error_m,pose_rotation_error_deg";

void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records);
std::vector<BenchmarkRecord> read_csv(std::istream& in);

/// Pooled median pass fractions over frames whose hue is at least
/// min_offset_deg away from the static filter's tuned hue.
struct NoiseRatio {
  std::string static_filter;
  double tuned_hue = 0.0;
  std::size_t frames = 0;
  double adaptive_median = 0.0;
  double static_median = 0.0;
  double ratio = 0.0;  // static / adaptive; infinity when adaptive is zero
};

std::vector<NoiseRatio> noise_ratios(const std::vector<BenchmarkRecord>& records,
                                     const std::vector<double>& static_tuned_hues,
                                     double min_offset_deg = 60.0);

struct AgreementSample {
  std::uint64_t seed_a = 0;
  std::uint64_t seed_b = 0;
  ColorHSV vehicle_marker;
  ColorHSV station_marker;
  double hue_delta = 0.0;
  double s_delta = 0.0;
  double v_delta = 0.0;
};

struct AgreementReport {
  std::vector<AgreementSample> samples;
  double max_hue_delta = 0.0;
  double median_hue_delta = 0.0;

  double fraction_within(double hue_tolerance_deg) const;
};

/// Pair k uses seeds (seed + 2k, seed + 2k + 1) for the vehicle and
/// station views.
AgreementReport run_agreement(const SceneSpec& scene, const PipelineConfig& config, int pairs,
                              std::uint64_t seed);
nlohmann::json to_json(const AgreementReport& report);

}  // namespace dockvision
