#include <cmath>
#include <sstream>

#include "doctest.h"

#include "dockvision/benchmark.hpp"
#include "dockvision/config.hpp"
#include "dockvision/error.hpp"
#include "dockvision/pipeline.hpp"

using namespace dockvision;
using nlohmann::json;

namespace {

SweepSpec small_sweep() {
  SweepSpec s;
  s.hues = {0, 120, 240};
  s.frames_per_hue = 2;
  s.static_tuned_hues = {0};
  s.scene.width = 160;
  s.scene.height = 120;
  s.scene.intrinsics = {150.0, 150.0, 79.5, 59.5, 0.0, 0.0, 160, 120};
  s.scene.marker_pose = frontal_pose(1.0);
  s.threads = 1;
  return s;
}

PipelineConfig small_config() {
  PipelineConfig c;
  c.intrinsics = {150.0, 150.0, 79.5, 59.5, 0.0, 0.0, 160, 120};
  return c;
}

}  // namespace

TEST_CASE("pipeline config defaults and JSON round trip") {
  const PipelineConfig d;
  CHECK(d.policy == ColorPolicy::kPureTernary);
  CHECK(d.rolling_window_s == 2.0);
  CHECK(d.hue_halfwidth_deg == 60.0);
  CHECK(d.sv_halfwidth == 0.1765);

  PipelineConfig c;
  c.policy = ColorPolicy::kPureComplement;
  c.log_sigmas = {1.5, 3.0};
  c.color_correction_offset = {0.1, -0.05, 0.0};
  c.intrinsics.k1 = -0.1;
  const auto back = pipeline_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.policy == ColorPolicy::kPureComplement);
  CHECK(back.log_sigmas == std::vector<double>{1.5, 3.0});
  CHECK(back.intrinsics.k1 == -0.1);
}

TEST_CASE("partial config documents keep defaults") {
  const auto c = pipeline_config_from_json(json::parse(R"({"mask": {"hue_halfwidth_deg": 45}})"));
  CHECK(c.hue_halfwidth_deg == 45.0);
  CHECK(c.sv_halfwidth == 0.1765);
  CHECK(c.blur_sigma == 2.0);
}

TEST_CASE("invalid config values are config errors") {
  for (const char* doc : {R"({"blur": {"sigma": 0}})", R"({"rolling_window_s": -1})",
                          R"({"blob": {"sigmas": []}})", R"({"policy": "triadic"})",
                          R"({"mask": {"sv_halfwidth": "wide"}})", R"({"spatial": {"ratio_tol": 0}})"}) {
    CAPTURE(doc);
    CHECK_THROWS_AS(pipeline_config_from_json(json::parse(doc)), ConfigError);
  }
  CHECK_THROWS_AS(load_pipeline_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("scene spec JSON round trip") {
  SceneSpec s;
  s.background_color = {33, 0.4, 0.5};
  s.distractors.push_back(orange_buoy(10, 20, 5));
  s.seed = 77;
  const auto back = scene_spec_from_json(to_json(s));
  CHECK(to_json(back) == to_json(s));
  const auto derived = scene_spec_from_json(json::parse(R"({"background_color": [100, 0.5, 0.5]})"));
  CHECK(derived.marker_emit_color == hsv_to_rgb(pure_ternary({100, 0.5, 0.5})));
}

TEST_CASE("sweep spec validation happens before rendering") {
  CHECK_THROWS_AS(sweep_spec_from_json(json::parse(R"({"frames_per_hue": 0})")), ConfigError);
  CHECK_THROWS_AS(sweep_spec_from_json(json::parse(R"({"detection": "some"})")), ConfigError);
  CHECK_THROWS_AS(sweep_spec_from_json(json::parse(R"({"hues": "all"})")), ConfigError);
  CHECK_THROWS_AS(sweep_spec_from_json(json::parse("[]")), ConfigError);
  const auto s = sweep_spec_from_json(json::parse(R"({"hues": [10, 20], "frames_per_hue": 3})"));
  CHECK(s.hues.size() == 2);
  CHECK(s.frames_per_hue == 3);
  CHECK(s.static_tuned_hues == std::vector<double>{0.0, 180.0});
}

TEST_CASE("fixed rounding never prints negative zero") {
  CHECK(fixed(-1e-12) == 0.0);
  CHECK(!std::signbit(fixed(-1e-12)));
  CHECK(fixed(1.23456789, 3) == 1.235);
}

TEST_CASE("quantile uses linear interpolation") {
  CHECK(quantile({3, 1, 2}, 0.5) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
  CHECK(quantile({5}, 0.9) == 5.0);
  CHECK_THROWS(quantile({}, 0.5));
}

TEST_CASE("benchmark records are ordered and recomputable from CSV") {
  const auto sweep = small_sweep();
  const auto result = run_benchmark(sweep, small_config());
  REQUIRE(result.records.size() == 3 * 2 * 3);
  for (std::size_t i = 1; i < result.records.size(); ++i)
    REQUIRE(result.records[i - 1].scene_id <= result.records[i].scene_id);
  CHECK(result.records[0].filter == "adaptive-ternary");
  CHECK(result.records[1].filter == "adaptive-complement");
  CHECK(result.records[2].filter == "static-0");
  CHECK(result.records[0].detected.has_value());
  CHECK_FALSE(result.records[1].detected.has_value());

  std::stringstream csv;
  write_csv(csv, result.records);
  const auto parsed = read_csv(csv);
  REQUIRE(parsed.size() == result.records.size());
  CHECK(to_json(summarize(parsed)) == to_json(result.summary));

  std::stringstream again;
  write_csv(again, parsed);
  CHECK(again.str() == csv.str());
}

TEST_CASE("benchmark output does not depend on the thread count") {
  auto sweep = small_sweep();
  const auto one = run_benchmark(sweep, small_config());
  sweep.threads = 3;
  const auto three = run_benchmark(sweep, small_config());
  std::stringstream a, b;
  write_csv(a, one.records);
  write_csv(b, three.records);
  CHECK(a.str() == b.str());
}

TEST_CASE("empty sweep gives a header-only CSV") {
  auto sweep = small_sweep();
  sweep.hues.clear();
  const auto result = run_benchmark(sweep, small_config());
  CHECK(result.records.empty());
  std::stringstream csv;
  write_csv(csv, result.records);
  CHECK(csv.str() == std::string(kCsvHeader) + "\n");
}

TEST_CASE("malformed CSV is rejected") {
  std::stringstream bad_header("a,b,c\n");
  CHECK_THROWS_AS(read_csv(bad_header), Error);
  std::stringstream bad_row(std::string(kCsvHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad_row), Error);
}

TEST_CASE("noise ratios pool off-tune frames") {
  std::vector<BenchmarkRecord> recs;
  auto add = [&](double hue, const char* filter, double frac) {
    BenchmarkRecord r;
    r.hue = hue;
    r.filter = filter;
    r.mask_pass_fraction = frac;
    recs.push_back(r);
  };
  add(0, "adaptive-ternary", 0.9);  // on-tune, excluded
  add(0, "static-0", 0.001);
  add(90, "adaptive-ternary", 0.01);
  add(90, "static-0", 0.2);
  add(180, "adaptive-ternary", 0.03);
  add(180, "static-0", 0.4);
  add(300, "adaptive-ternary", 0.02);
  add(300, "static-0", 0.1);
  const auto ratios = noise_ratios(recs, {0.0});
  REQUIRE(ratios.size() == 1);
  CHECK(ratios[0].frames == 3);
  CHECK(ratios[0].adaptive_median == doctest::Approx(0.02));
  CHECK(ratios[0].static_median == doctest::Approx(0.2));
  CHECK(ratios[0].ratio == doctest::Approx(10.0));
}

TEST_CASE("static interval is tuned on the nominal background") {
  SceneSpec s;
  const auto m = static_interval(s, 0.0, ColorPolicy::kPureTernary, PipelineConfig{});
  const ColorHSV bg{0.0, s.background_color.s, s.background_color.v};
  const auto sensed = rgb_to_hsv(predict_sensed_color(hsv_to_rgb(bg), hsv_to_rgb(pure_ternary(bg))));
  CHECK(m.hue_center == doctest::Approx(sensed.h));
  CHECK(m.s_lo == doctest::Approx(sensed.s - 0.1765));
}

TEST_CASE("station and vehicle agree on a noise-free background") {
  SceneSpec s = small_sweep().scene;
  s.noise_sigma = 0.0;
  s.markers_visible = false;
  const auto report = run_agreement(s, small_config(), 3, 10);
  REQUIRE(report.samples.size() == 3);
  CHECK(report.max_hue_delta == 0.0);
  CHECK(report.samples[1].seed_a == 12);
  CHECK(report.samples[1].seed_b == 13);
  CHECK_THROWS_AS(run_agreement(s, small_config(), 0, 1), ConfigError);
}

TEST_CASE("dock station pipeline applies the offset to the rolling color") {
  PipelineConfig c;
  c.color_correction_offset = {0.0, -0.1, 0.2};
  DockStationPipeline station(c);
  SceneSpec s;
  s.markers_visible = false;
  s.noise_sigma = 0.0;
  s.background_gradient = {};
  const auto out = station.process(render(s).first);
  CHECK(hue_distance(out.marker_color.h, 80.0) < 0.5);
  const auto rgb = hsv_to_rgb(out.marker_color);
  CHECK(out.led_command.g == doctest::Approx(rgb.g - 0.1));
  CHECK(out.led_command.b == doctest::Approx(std::min(1.0, rgb.b + 0.2)));
  CHECK(out.pure_background.s == 1.0);
}

TEST_CASE("benchmark pass fractions match a direct pipeline run") {
  const auto sweep = small_sweep();
  const auto config = small_config();
  const auto result = run_benchmark(sweep, config);
  // Scene 3 is the second frame of the second hue.
  SceneSpec scene = sweep.scene;
  scene.background_color.h = sweep.hues[1];
  const ColorHSV station = station_marker_color(scene, 1, ColorPolicy::kPureTernary, config);
  scene.marker_emit_color = hsv_to_rgb(station);
  scene.seed = sweep.scene.seed + 3;
  const Frame blurred = gaussian_blur(render(scene).first, config.blur_sigma, config.blur_radius);
  const auto hsv = to_hsv(blurred);
  const auto bg = extract_background(blurred, hsv);

  const auto adaptive = color_mask_hsv(
      hsv, &bg.mask,
      mask_interval(predict_sensed_hsv(bg.mean_color, pure_ternary(bg.mean_color))));
  const auto complement = color_mask_hsv(
      hsv, &bg.mask,
      mask_interval(predict_sensed_hsv(bg.mean_color, pure_complement(bg.mean_color))));
  const auto fixed_hue = color_mask_hsv(
      hsv, nullptr, static_interval(sweep.scene, 0.0, ColorPolicy::kPureTernary, config));

  std::vector<const BenchmarkRecord*> recs;
  for (const auto& r : result.records)
    if (r.scene_id == 3) recs.push_back(&r);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0]->mask_pass_fraction == fixed(adaptive.pass_fraction, 8));
  CHECK(recs[1]->mask_pass_fraction == fixed(complement.pass_fraction, 8));
  CHECK(recs[2]->mask_pass_fraction == fixed(fixed_hue.pass_fraction, 8));
  CHECK(recs[0]->hue == 120.0);
  CHECK(recs[0]->frame == 1);
}
