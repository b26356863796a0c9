#include "dockvision/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "dockvision/background.hpp"
#include "dockvision/error.hpp"
#include "dockvision/pipeline.hpp"

namespace dockvision {

using nlohmann::json;

namespace {

constexpr std::uint64_t kStationSeedOffset = 1'000'000'007ULL;
constexpr double kGoldenAngleDeg = 137.50776405003785;

std::string format_number(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string hue_label(double h) {
  std::ostringstream s;
  s << h;
  return s.str();
}

DetectionMode parse_detection(const std::string& s) {
  if (s == "none") return DetectionMode::kNone;
  if (s == "adaptive") return DetectionMode::kAdaptive;
  if (s == "all") return DetectionMode::kAll;
  throw ConfigError("unknown detection mode '" + s + "'");
}

const char* detection_name(DetectionMode m) {
  switch (m) {
    case DetectionMode::kNone: return "none";
    case DetectionMode::kAdaptive: return "adaptive";
    case DetectionMode::kAll: return "all";
  }
  return "adaptive";
}

std::vector<FilterKind> filters_for(const SweepSpec& sweep) {
  std::vector<FilterKind> out{{FilterKind::Type::kAdaptiveTernary, 0.0},
                              {FilterKind::Type::kAdaptiveComplement, 0.0}};
  for (double h : sweep.static_tuned_hues) out.push_back({FilterKind::Type::kStatic, h});
  return out;
}

bool runs_detection(const FilterKind& f, const SweepSpec& sweep) {
  switch (sweep.detection) {
    case DetectionMode::kNone: return false;
    case DetectionMode::kAll: return true;
    case DetectionMode::kAdaptive:
      return (f.type == FilterKind::Type::kAdaptiveTernary &&
              sweep.marker_policy == ColorPolicy::kPureTernary) ||
             (f.type == FilterKind::Type::kAdaptiveComplement &&
              sweep.marker_policy == ColorPolicy::kPureComplement);
  }
  return false;
}

void score_detection(BenchmarkRecord& rec, const LandmarkStage& stage, const GroundTruth& truth,
                     const PipelineConfig& config) {
  rec.detected = false;
  if (!stage.detection) return;
  double total = 0.0;
  for (Corner c : kCorners) {
    const auto i = static_cast<std::size_t>(c);
    if (!truth.visible[i]) return;
    const Blob& b = stage.detection->at(c);
    const double err = std::hypot(b.cx - truth.corners[i].x(), b.cy - truth.corners[i].y());
    // A corner counts when it lands on the right marker.
    if (err > std::max(2.0, truth.pixel_radius[i])) return;
    total += err;
  }
  rec.detected = true;
  rec.corner_error_px = fixed(total / 4.0, 6);
  try {
    const auto pose = solve_pnp(*stage.detection, config.geometry, config.intrinsics);
    rec.pose_translation_error_m = fixed((pose.translation - truth.pose.translation).norm(), 6);
    rec.pose_rotation_error_deg = fixed(rotation_angle_deg(pose.rotation, truth.pose.rotation), 6);
  } catch (const PoseError&) {
  }
}

struct FilterPlan {
  MaskInterval interval;
  bool adaptive;   // excludes background pixels
  bool keep_mask;  // pass mask is needed for detection
};

// Same results as color_mask_hsv per filter, but one sweep over the HSV
// raster serves every filter.
std::vector<ColorMaskResult> apply_filters(const Raster<ColorHSV>& hsv, const Mask& background,
                                           const std::vector<FilterPlan>& plans) {
  std::vector<ColorMaskResult> out(plans.size());
  std::vector<std::size_t> passed(plans.size(), 0);
  for (std::size_t k = 0; k < plans.size(); ++k)
    if (plans[k].keep_mask) out[k].pass = Mask(hsv.width(), hsv.height());
  auto src = hsv.pixels();
  auto bg = background.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const ColorHSV& c = src[i];
    for (std::size_t k = 0; k < plans.size(); ++k) {
      const auto& p = plans[k];
      if (p.adaptive && bg[i]) continue;
      const auto& m = p.interval;
      if (c.s < m.s_lo || c.s > m.s_hi || c.v < m.v_lo || c.v > m.v_hi) continue;
      if (!color_in_interval(c, m)) continue;
      ++passed[k];
      if (p.keep_mask) out[k].pass.pixels()[i] = 1;
    }
  }
  for (std::size_t k = 0; k < plans.size(); ++k)
    out[k].pass_fraction = static_cast<double>(passed[k]) / static_cast<double>(src.size());
  return out;
}

std::vector<BenchmarkRecord> evaluate_scene(const SweepSpec& sweep, const PipelineConfig& config,
                                            const std::vector<FilterKind>& filters,
                                            const std::vector<MaskInterval>& static_intervals,
                                            const std::vector<ColorHSV>& station_colors,
                                            std::size_t id) {
  const auto per_hue = static_cast<std::size_t>(sweep.frames_per_hue);
  const std::size_t hue_index = id / per_hue;
  SceneSpec scene = sweep.scene;
  scene.background_color.h = wrap_hue(sweep.hues[hue_index]);
  scene.marker_emit_color = hsv_to_rgb(station_colors[hue_index]);
  scene.seed = sweep.scene.seed + id;
  const auto [frame, truth] = render(scene);

  const Frame blurred = gaussian_blur(frame, config.blur_sigma, config.blur_radius);
  const Raster<ColorHSV> hsv = to_hsv(blurred);
  const BackgroundEstimate bg = extract_background(blurred, hsv);

  std::vector<FilterPlan> plans;
  std::size_t static_i = 0;
  for (const auto& f : filters) {
    FilterPlan plan{{}, f.type != FilterKind::Type::kStatic, runs_detection(f, sweep)};
    if (plan.adaptive) {
      const ColorPolicy policy = f.type == FilterKind::Type::kAdaptiveTernary
                                     ? ColorPolicy::kPureTernary
                                     : ColorPolicy::kPureComplement;
      const ColorHSV marker = select_marker_color(bg.mean_color, policy);
      plan.interval = mask_interval(predict_sensed_hsv(bg.mean_color, marker),
                                    config.hue_halfwidth_deg, config.sv_halfwidth);
    } else {
      plan.interval = static_intervals[static_i++];
    }
    plans.push_back(plan);
  }
  const auto masks = apply_filters(hsv, bg.mask, plans);

  std::vector<BenchmarkRecord> out;
  for (std::size_t k = 0; k < filters.size(); ++k) {
    BenchmarkRecord rec;
    rec.scene_id = id;
    rec.hue = sweep.hues[hue_index];
    rec.frame = static_cast<int>(id % per_hue);
    rec.filter = filters[k].name();
    rec.mask_pass_fraction = fixed(masks[k].pass_fraction, 8);
    if (plans[k].keep_mask) {
      const auto stage = detect_landmarks(masks[k].pass, masks[k].pass_fraction, config);
      score_detection(rec, stage, truth, config);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return std::stod(field);
}

}  // namespace

void SweepSpec::validate() const {
  for (double h : hues)
    if (!std::isfinite(h)) throw ConfigError("sweep.hues must be finite");
  if (frames_per_hue <= 0) throw ConfigError("sweep.frames_per_hue must be positive");
  for (double h : static_tuned_hues)
    if (!std::isfinite(h)) throw ConfigError("sweep.static_tuned_hues must be finite");
  if (threads < 0) throw ConfigError("sweep.threads must be >= 0");
  if (scene.width <= 0 || scene.height <= 0) throw ConfigError("scene size must be positive");
  if (!(scene.noise_sigma >= 0.0)) throw ConfigError("scene.noise_sigma must be >= 0");
}

SweepSpec sweep_spec_from_json(const json& doc) {
  SweepSpec s;
  try {
    if (!doc.is_object()) throw ConfigError("sweep document must be an object");
    if (doc.contains("hues")) s.hues = doc["hues"].get<std::vector<double>>();
    if (doc.contains("frames_per_hue")) s.frames_per_hue = doc["frames_per_hue"].get<int>();
    if (doc.contains("static_tuned_hues"))
      s.static_tuned_hues = doc["static_tuned_hues"].get<std::vector<double>>();
    if (doc.contains("marker_policy"))
      s.marker_policy = parse_policy(doc["marker_policy"].get<std::string>());
    if (doc.contains("detection")) s.detection = parse_detection(doc["detection"].get<std::string>());
    if (doc.contains("threads")) s.threads = doc["threads"].get<int>();
    if (doc.contains("scene")) s.scene = scene_spec_from_json(doc["scene"]);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid sweep: ") + e.what());
  }
  s.validate();
  return s;
}

json to_json(const SweepSpec& s) {
  return {{"hues", s.hues},
          {"frames_per_hue", s.frames_per_hue},
          {"static_tuned_hues", s.static_tuned_hues},
          {"marker_policy", std::string(to_string(s.marker_policy))},
          {"detection", detection_name(s.detection)},
          {"threads", s.threads},
          {"scene", to_json(s.scene)}};
}

std::string FilterKind::name() const {
  switch (type) {
    case Type::kAdaptiveTernary: return "adaptive-ternary";
    case Type::kAdaptiveComplement: return "adaptive-complement";
    case Type::kStatic: return "static-" + hue_label(tuned_hue);
  }
  return "unknown";
}

MaskInterval static_interval(const SceneSpec& scene, double tuned_hue, ColorPolicy marker_policy,
                             const PipelineConfig& config) {
  ColorHSV nominal = scene.background_color;
  nominal.h = wrap_hue(tuned_hue);
  const ColorHSV marker = select_marker_color(nominal, marker_policy);
  return mask_interval(predict_sensed_hsv(nominal, marker), config.hue_halfwidth_deg,
                       config.sv_halfwidth);
}

ColorHSV station_marker_color(const SceneSpec& scene, std::size_t hue_index, ColorPolicy policy,
                              const PipelineConfig& config) {
  SceneSpec view = scene;
  view.markers_visible = false;
  view.distractors.clear();
  view.seed = scene.seed + kStationSeedOffset + hue_index;
  PipelineConfig station = config;
  station.policy = policy;
  DockStationPipeline pipeline(station);
  return pipeline.process(render(view).first).marker_color;
}

BenchmarkResult run_benchmark(const SweepSpec& sweep, const PipelineConfig& config) {
  sweep.validate();
  config.validate();
  const auto filters = filters_for(sweep);

  std::vector<MaskInterval> static_intervals;
  for (double h : sweep.static_tuned_hues)
    static_intervals.push_back(static_interval(sweep.scene, h, sweep.marker_policy, config));

  std::vector<ColorHSV> station_colors;
  for (std::size_t i = 0; i < sweep.hues.size(); ++i) {
    SceneSpec scene = sweep.scene;
    scene.background_color.h = wrap_hue(sweep.hues[i]);
    station_colors.push_back(station_marker_color(scene, i, sweep.marker_policy, config));
  }

  const std::size_t total = sweep.hues.size() * static_cast<std::size_t>(sweep.frames_per_hue);
  std::vector<std::vector<BenchmarkRecord>> per_scene(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t id = next++; id < total; id = next++)
      per_scene[id] = evaluate_scene(sweep, config, filters, static_intervals, station_colors, id);
  };

  unsigned n = sweep.threads > 0 ? static_cast<unsigned>(sweep.threads)
                                 : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, total));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }

  BenchmarkResult result;
  result.records.reserve(total * filters.size());
  for (auto& v : per_scene)
    for (auto& r : v) result.records.push_back(std::move(r));
  result.summary = summarize(result.records);
  return result;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty data");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<FilterSummary> summarize(const std::vector<BenchmarkRecord>& records) {
  std::map<std::string, std::vector<const BenchmarkRecord*>> groups;
  for (const auto& r : records) groups[r.filter].push_back(&r);

  std::vector<FilterSummary> out;
  for (const auto& [name, recs] : groups) {
    FilterSummary s;
    s.filter = name;
    s.frames = recs.size();
    std::vector<double> v;
    double sum = 0.0;
    for (const auto* r : recs) {
      v.push_back(r->mask_pass_fraction);
      sum += r->mask_pass_fraction;
      if (r->detected) {
        ++s.detection_evaluated;
        s.detected += *r->detected;
      }
    }
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    s.q1 = quantile(v, 0.25);
    s.median = quantile(v, 0.5);
    s.q3 = quantile(v, 0.75);
    s.mean = sum / static_cast<double>(v.size());
    out.push_back(s);
  }
  return out;
}

json to_json(const std::vector<FilterSummary>& summary) {
  json out = json::array();
  for (const auto& s : summary) {
    json row = {{"filter", s.filter},          {"frames", s.frames},
                {"min", fixed(s.min, 8)},       {"q1", fixed(s.q1, 8)},
                {"median", fixed(s.median, 8)}, {"q3", fixed(s.q3, 8)},
                {"max", fixed(s.max, 8)},       {"mean", fixed(s.mean, 8)}};
    if (s.detection_evaluated > 0) {
      row["detection_evaluated"] = s.detection_evaluated;
      row["detection_rate"] =
          fixed(static_cast<double>(s.detected) / static_cast<double>(s.detection_evaluated), 6);
    }
    out.push_back(row);
  }
  return out;
}

void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << kCsvHeader << '\n';
  auto opt = [](const std::optional<double>& v) {
    return v ? format_number(*v, "%.6f") : std::string();
  };
  for (const auto& r : records) {
    out << r.scene_id << ',' << hue_label(r.hue) << ',' << r.frame << ',' << r.filter << ','
        << format_number(r.mask_pass_fraction, "%.8f") << ','
        << (r.detected ? (*r.detected ? "1" : "0") : "") << ',' << opt(r.corner_error_px) << ','
        << opt(r.pose_translation_error_m) << ',' << opt(r.pose_rotation_error_deg) << '\n';
  }
}

std::vector<BenchmarkRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error("benchmark CSV: unexpected header");
  std::vector<BenchmarkRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 9) throw Error("benchmark CSV line " + std::to_string(line_no) + ": expected 9 fields");
    try {
      BenchmarkRecord r;
      r.scene_id = std::stoull(f[0]);
      r.hue = std::stod(f[1]);
      r.frame = std::stoi(f[2]);
      r.filter = f[3];
      r.mask_pass_fraction = std::stod(f[4]);
      if (!f[5].empty()) r.detected = f[5] == "1";
      r.corner_error_px = parse_optional(f[6]);
      r.pose_translation_error_m = parse_optional(f[7]);
      r.pose_rotation_error_deg = parse_optional(f[8]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error("benchmark CSV line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return out;
}

std::vector<NoiseRatio> noise_ratios(const std::vector<BenchmarkRecord>& records,
                                     const std::vector<double>& static_tuned_hues,
                                     double min_offset_deg) {
  std::vector<NoiseRatio> out;
  for (double tuned : static_tuned_hues) {
    const std::string name = FilterKind{FilterKind::Type::kStatic, tuned}.name();
    std::vector<double> adaptive, fixed_filter;
    std::size_t frames = 0;
    for (const auto& r : records) {
      if (hue_distance(r.hue, tuned) < min_offset_deg) continue;
      if (r.filter == "adaptive-ternary") {
        adaptive.push_back(r.mask_pass_fraction);
        ++frames;
      } else if (r.filter == name) {
        fixed_filter.push_back(r.mask_pass_fraction);
      }
    }
    if (adaptive.empty() || fixed_filter.empty()) continue;
    NoiseRatio n;
    n.static_filter = name;
    n.tuned_hue = tuned;
    n.frames = frames;
    n.adaptive_median = quantile(adaptive, 0.5);
    n.static_median = quantile(fixed_filter, 0.5);
    n.ratio = n.adaptive_median > 0.0 ? n.static_median / n.adaptive_median
                                      : std::numeric_limits<double>::infinity();
    out.push_back(n);
  }
  return out;
}

double AgreementReport::fraction_within(double tol) const {
  if (samples.empty()) return 0.0;
  const auto n = std::count_if(samples.begin(), samples.end(),
                               [&](const AgreementSample& s) { return s.hue_delta <= tol; });
  return static_cast<double>(n) / static_cast<double>(samples.size());
}

AgreementReport run_agreement(const SceneSpec& scene, const PipelineConfig& config, int pairs,
                              std::uint64_t seed) {
  if (pairs <= 0) throw ConfigError("agreement pairs must be positive");
  config.validate();
  AgreementReport report;
  for (int k = 0; k < pairs; ++k) {
    SceneSpec spec = scene;
    spec.background_color.h = wrap_hue(scene.background_color.h + kGoldenAngleDeg * k);

    AgreementSample s;
    s.seed_a = seed + 2 * static_cast<std::uint64_t>(k);
    s.seed_b = s.seed_a + 1;

    SceneSpec station_view = spec;
    station_view.markers_visible = false;
    station_view.distractors.clear();
    station_view.seed = s.seed_b;
    DockStationPipeline station(config);
    s.station_marker = station.process(render(station_view).first).marker_color;

    SceneSpec vehicle_view = spec;
    vehicle_view.marker_emit_color = hsv_to_rgb(s.station_marker);
    vehicle_view.seed = s.seed_a;
    const auto head = run_pipeline_head(render(vehicle_view).first, config);
    s.vehicle_marker = head.frame_marker_color;

    s.hue_delta = hue_distance(s.vehicle_marker.h, s.station_marker.h);
    s.s_delta = std::abs(s.vehicle_marker.s - s.station_marker.s);
    s.v_delta = std::abs(s.vehicle_marker.v - s.station_marker.v);
    report.samples.push_back(s);
  }
  std::vector<double> d;
  for (const auto& s : report.samples) d.push_back(s.hue_delta);
  report.max_hue_delta = *std::max_element(d.begin(), d.end());
  report.median_hue_delta = quantile(d, 0.5);
  return report;
}

json to_json(const AgreementReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"seed_a", s.seed_a},
                       {"seed_b", s.seed_b},
                       {"vehicle_marker", to_json(s.vehicle_marker)},
                       {"station_marker", to_json(s.station_marker)},
                       {"hue_delta_deg", fixed(s.hue_delta, 9)},
                       {"s_delta", fixed(s.s_delta, 9)},
                       {"v_delta", fixed(s.v_delta, 9)}});
  }
  return {{"pairs", r.samples.size()},
          {"max_hue_delta_deg", fixed(r.max_hue_delta, 9)},
          {"median_hue_delta_deg", fixed(r.median_hue_delta, 9)},
          {"within_10_deg", fixed(r.fraction_within(10.0), 6)},
          {"samples", samples}};
}

}  // namespace dockvision
