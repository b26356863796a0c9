#include "dockvision/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "dockvision/error.hpp"

namespace dockvision {

using nlohmann::json;

double fixed(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(value * scale) / scale;
  return r == 0.0 ? 0.0 : r;  // no "-0.0" in output
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
  }
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config field out of range: " + what);
}

template <typename T>
void read(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

ColorRGB rgb_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected an [r, g, b] array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ColorHSV hsv_from(const json& j) {
  if (j.is_array() && j.size() == 3) return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  if (j.is_object()) return {j.value("h", 0.0), j.value("s", 0.0), j.value("v", 0.0)};
  throw ConfigError("expected an HSV color");
}

Eigen::Matrix3d rotation_from(const json& j) {
  // Either a 3x3 row-major nested array or {"axis_angle_deg": [rx, ry, rz]}.
  if (j.is_array() && j.size() == 3) {
    Eigen::Matrix3d r;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) r(i, k) = j.at(i).at(k).get<double>();
    return r;
  }
  if (j.is_object() && j.contains("axis_angle_deg")) {
    const auto& a = j.at("axis_angle_deg");
    Eigen::Vector3d w(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
    return so3_exp(w * std::numbers::pi / 180.0);
  }
  throw ConfigError("expected a rotation matrix or axis_angle_deg");
}

}  // namespace

void PipelineConfig::validate() const {
  require(blur_sigma > 0.0, "blur.sigma > 0");
  require(blur_radius >= 1, "blur.radius >= 1");
  require(rolling_window_s > 0.0, "rolling_window_s > 0");
  require(frame_rate_hz > 0.0, "frame_rate_hz > 0");
  require(hue_halfwidth_deg > 0.0 && hue_halfwidth_deg <= 180.0, "mask.hue_halfwidth_deg in (0, 180]");
  require(sv_halfwidth >= 0.0 && sv_halfwidth <= 1.0, "mask.sv_halfwidth in [0, 1]");
  require(!log_sigmas.empty(), "blob.sigmas non-empty");
  for (double s : log_sigmas) require(s > 0.0 && s <= 64.0, "blob.sigmas in (0, 64]");
  require(log_min_response >= 0.0, "blob.min_response >= 0");
  require(min_area >= 1, "blob.min_area >= 1");
  require(max_blobs >= 4, "blob.max_blobs >= 4");
  require(ratio_tol >= 1.0, "spatial.ratio_tol >= 1");
  require(angle_tol_deg > 0.0 && angle_tol_deg < 90.0, "spatial.angle_tol_deg in (0, 90)");
  require(geometry.width > 0.0 && geometry.height > 0.0, "geometry dimensions > 0");
  require(intrinsics.fx > 0.0 && intrinsics.fy > 0.0, "intrinsics.fx, fy > 0");
  require(intrinsics.width > 0 && intrinsics.height > 0, "intrinsics.width, height > 0");
  require(intrinsics.cx >= 0.0 && intrinsics.cx <= intrinsics.width && intrinsics.cy >= 0.0 &&
              intrinsics.cy <= intrinsics.height,
          "principal point inside the image");
  for (double o : {color_correction_offset.r, color_correction_offset.g, color_correction_offset.b})
    require(o >= -1.0 && o <= 1.0, "color_correction_offset in [-1, 1]");
}

json to_json(const ColorHSV& c) { return {{"h", fixed(c.h)}, {"s", fixed(c.s)}, {"v", fixed(c.v)}}; }

json to_json(const ColorRGB& c) {
  return {{"r", fixed(c.r)}, {"g", fixed(c.g)}, {"b", fixed(c.b)},
          {"rgb8", {to_byte(c.r), to_byte(c.g), to_byte(c.b)}}};
}

json to_json(const ScenePose& pose) {
  json rot = json::array();
  for (int i = 0; i < 3; ++i)
    rot.push_back({fixed(pose.rotation(i, 0), 9), fixed(pose.rotation(i, 1), 9), fixed(pose.rotation(i, 2), 9)});
  return {{"rotation", rot},
          {"translation", {fixed(pose.translation.x(), 9), fixed(pose.translation.y(), 9),
                           fixed(pose.translation.z(), 9)}},
          {"reprojection_rmse", fixed(pose.reprojection_rmse, 9)}};
}

json to_json(const GroundTruth& truth) {
  json corners = json::object();
  for (Corner c : kCorners) {
    const auto i = static_cast<std::size_t>(c);
    json entry = {{"visible", truth.visible[i]},
                  {"pixel_radius", fixed(truth.pixel_radius[i])},
                  {"marker_pixel_count", truth.marker_pixels[i].size()}};
    if (std::isfinite(truth.corners[i].x()))
      entry["pixel"] = {fixed(truth.corners[i].x(), 6), fixed(truth.corners[i].y(), 6)};
    else
      entry["pixel"] = nullptr;
    corners[corner_name(c)] = entry;
  }
  return {{"corners", corners},
          {"pose", to_json(truth.pose)},
          {"background_mean", to_json(truth.background_mean)}};
}

namespace {

json intrinsics_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"k1", k.k1},
          {"k2", k.k2}, {"width", k.width}, {"height", k.height}};
}

void read_intrinsics(const json& j, CameraIntrinsics& k) {
  read(j, "fx", k.fx);
  read(j, "fy", k.fy);
  read(j, "cx", k.cx);
  read(j, "cy", k.cy);
  read(j, "k1", k.k1);
  read(j, "k2", k.k2);
  read(j, "width", k.width);
  read(j, "height", k.height);
}

}  // namespace

json to_json(const PipelineConfig& c) {
  return {
      {"policy", std::string(to_string(c.policy))},
      {"blur", {{"sigma", c.blur_sigma}, {"radius", c.blur_radius}}},
      {"rolling_window_s", c.rolling_window_s},
      {"frame_rate_hz", c.frame_rate_hz},
      {"mask", {{"hue_halfwidth_deg", c.hue_halfwidth_deg}, {"sv_halfwidth", c.sv_halfwidth}}},
      {"blob",
       {{"sigmas", c.log_sigmas},
        {"min_response", c.log_min_response},
        {"min_area", c.min_area},
        {"max_blobs", c.max_blobs}}},
      {"spatial", {{"ratio_tol", c.ratio_tol}, {"angle_tol_deg", c.angle_tol_deg}}},
      {"geometry", {{"width_m", c.geometry.width}, {"height_m", c.geometry.height}}},
      {"intrinsics", intrinsics_json(c.intrinsics)},
      {"color_correction_offset",
       {c.color_correction_offset.r, c.color_correction_offset.g, c.color_correction_offset.b}},
  };
}

PipelineConfig pipeline_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  PipelineConfig c;
  try {
    if (doc.contains("policy")) c.policy = parse_policy(doc.at("policy").get<std::string>());
    if (doc.contains("blur")) {
      read(doc["blur"], "sigma", c.blur_sigma);
      read(doc["blur"], "radius", c.blur_radius);
    }
    read(doc, "rolling_window_s", c.rolling_window_s);
    read(doc, "frame_rate_hz", c.frame_rate_hz);
    if (doc.contains("mask")) {
      read(doc["mask"], "hue_halfwidth_deg", c.hue_halfwidth_deg);
      read(doc["mask"], "sv_halfwidth", c.sv_halfwidth);
    }
    if (doc.contains("blob")) {
      read(doc["blob"], "sigmas", c.log_sigmas);
      read(doc["blob"], "min_response", c.log_min_response);
      read(doc["blob"], "min_area", c.min_area);
      read(doc["blob"], "max_blobs", c.max_blobs);
    }
    if (doc.contains("spatial")) {
      read(doc["spatial"], "ratio_tol", c.ratio_tol);
      read(doc["spatial"], "angle_tol_deg", c.angle_tol_deg);
    }
    if (doc.contains("geometry")) {
      read(doc["geometry"], "width_m", c.geometry.width);
      read(doc["geometry"], "height_m", c.geometry.height);
    }
    if (doc.contains("intrinsics")) read_intrinsics(doc["intrinsics"], c.intrinsics);
    if (doc.contains("color_correction_offset")) c.color_correction_offset = rgb_from(doc["color_correction_offset"]);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config document: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return pipeline_config_from_json(read_json_file(path));
}

json to_json(const SceneSpec& s) {
  json distractors = json::array();
  for (const auto& d : s.distractors) {
    distractors.push_back({{"shape", d.shape == Distractor::Shape::kDisk ? "disk" : "rectangle"},
                           {"color", {d.color.r, d.color.g, d.color.b}},
                           {"cx", d.cx},
                           {"cy", d.cy},
                           {"half_width", d.half_width},
                           {"half_height", d.half_height}});
  }
  json rot = json::array();
  for (int i = 0; i < 3; ++i)
    rot.push_back({s.marker_pose.rotation(i, 0), s.marker_pose.rotation(i, 1), s.marker_pose.rotation(i, 2)});
  return {
      {"width", s.width},
      {"height", s.height},
      {"background_color", {s.background_color.h, s.background_color.s, s.background_color.v}},
      {"background_gradient",
       {{"hue_span_deg", s.background_gradient.hue_span},
        {"saturation_span", s.background_gradient.saturation_span},
        {"value_span", s.background_gradient.value_span}}},
      {"marker_pose",
       {{"rotation", rot},
        {"translation", {s.marker_pose.translation.x(), s.marker_pose.translation.y(), s.marker_pose.translation.z()}}}},
      {"geometry", {{"width_m", s.geometry.width}, {"height_m", s.geometry.height}}},
      {"markers_visible", s.markers_visible},
      {"marker_emit_color", {s.marker_emit_color.r, s.marker_emit_color.g, s.marker_emit_color.b}},
      {"marker_radius_m", s.marker_radius},
      {"halo_sigma_factor", s.halo_sigma_factor},
      {"halo_extent_factor", s.halo_extent_factor},
      {"distractors", distractors},
      {"noise_sigma", s.noise_sigma},
      {"intrinsics", intrinsics_json(s.intrinsics)},
      {"seed", s.seed},
      {"timestamp", s.timestamp},
  };
}

SceneSpec scene_spec_from_json(const json& doc, SceneSpec s) {
  if (!doc.is_object()) throw ConfigError("scene document must be a JSON object");
  try {
    read(doc, "width", s.width);
    read(doc, "height", s.height);
    bool background_given = false;
    if (doc.contains("background_color")) {
      s.background_color = normalize(hsv_from(doc["background_color"]));
      background_given = true;
    }
    if (doc.contains("background_gradient")) {
      const auto& g = doc["background_gradient"];
      read(g, "hue_span_deg", s.background_gradient.hue_span);
      read(g, "saturation_span", s.background_gradient.saturation_span);
      read(g, "value_span", s.background_gradient.value_span);
    }
    if (doc.contains("marker_pose")) {
      const auto& p = doc["marker_pose"];
      if (p.contains("rotation")) s.marker_pose.rotation = rotation_from(p["rotation"]);
      if (p.contains("translation")) {
        const auto& t = p["translation"];
        s.marker_pose.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
      }
    }
    if (doc.contains("geometry")) {
      read(doc["geometry"], "width_m", s.geometry.width);
      read(doc["geometry"], "height_m", s.geometry.height);
    }
    read(doc, "markers_visible", s.markers_visible);
    // Markers follow the background unless an emit color is given.
    if (doc.contains("marker_emit_color")) {
      s.marker_emit_color = rgb_from(doc["marker_emit_color"]);
    } else if (doc.contains("marker_policy")) {
      const auto policy = parse_policy(doc["marker_policy"].get<std::string>());
      s.marker_emit_color = hsv_to_rgb(select_marker_color(s.background_color, policy));
    } else if (background_given) {
      s.marker_emit_color = hsv_to_rgb(pure_ternary(s.background_color));
    }
    read(doc, "marker_radius_m", s.marker_radius);
    read(doc, "halo_sigma_factor", s.halo_sigma_factor);
    read(doc, "halo_extent_factor", s.halo_extent_factor);
    if (doc.contains("distractors")) {
      s.distractors.clear();
      for (const auto& d : doc["distractors"]) {
        const std::string shape = d.value("shape", "disk");
        if (shape == "orange_buoy") {
          s.distractors.push_back(orange_buoy(d.at("cx").get<double>(), d.at("cy").get<double>(),
                                              d.at("half_width").get<double>()));
          continue;
        }
        Distractor out;
        if (shape == "disk") out.shape = Distractor::Shape::kDisk;
        else if (shape == "rectangle") out.shape = Distractor::Shape::kRectangle;
        else throw ConfigError("unknown distractor shape '" + shape + "'");
        out.color = rgb_from(d.at("color"));
        out.cx = d.at("cx").get<double>();
        out.cy = d.at("cy").get<double>();
        out.half_width = d.at("half_width").get<double>();
        out.half_height = d.value("half_height", out.half_width);
        s.distractors.push_back(out);
      }
    }
    read(doc, "noise_sigma", s.noise_sigma);
    if (doc.contains("intrinsics")) read_intrinsics(doc["intrinsics"], s.intrinsics);
    read(doc, "seed", s.seed);
    read(doc, "timestamp", s.timestamp);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad scene document: ") + e.what());
  }
  if (s.width <= 0 || s.height <= 0) throw ConfigError("scene dimensions must be positive");
  if (s.noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (!(s.marker_pose.translation.z() > 0.0)) throw ConfigError("marker pose depth must be positive");
  if (!(s.marker_radius > 0.0)) throw ConfigError("marker_radius_m must be positive");
  return s;
}

}  // namespace dockvision
