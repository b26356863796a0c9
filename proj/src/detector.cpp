#include "dockvision/detector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace dockvision {

const char* corner_name(Corner c) {
  switch (c) {
    case Corner::kTopLeft: return "TL";
    case Corner::kTopRight: return "TR";
    case Corner::kBottomLeft: return "BL";
    case Corner::kBottomRight: return "BR";
  }
  return "?";
}

Eigen::Vector3d MarkerGeometry::corner(Corner c) const {
  const double hx = 0.5 * width;
  const double hy = 0.5 * height;
  switch (c) {
    case Corner::kTopLeft: return {-hx, -hy, 0.0};
    case Corner::kTopRight: return {hx, -hy, 0.0};
    case Corner::kBottomLeft: return {-hx, hy, 0.0};
    case Corner::kBottomRight: return {hx, hy, 0.0};
  }
  return Eigen::Vector3d::Zero();
}

namespace {

ColorMaskResult threshold_impl(const Frame& frame, const Mask* background,
                               const MaskInterval& interval) {
  ColorMaskResult out{Mask(frame.width(), frame.height()), 0.0};
  if (background && (background->width() != frame.width() || background->height() != frame.height()))
    throw std::invalid_argument("background mask does not match frame dimensions");

  auto src = frame.image.pixels();
  auto dst = out.pass.pixels();
  std::size_t passed = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (background && background->pixels()[i]) continue;
    if (color_in_interval(rgb_to_hsv(src[i]), interval)) {
      dst[i] = 1;
      ++passed;
    }
  }
  out.pass_fraction = static_cast<double>(passed) / static_cast<double>(src.size());
  return out;
}

}  // namespace

Raster<ColorHSV> to_hsv(const Frame& frame) {
  Raster<ColorHSV> out(frame.width(), frame.height());
  auto src = frame.image.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = rgb_to_hsv(src[i]);
  return out;
}

ColorMaskResult color_mask_hsv(const Raster<ColorHSV>& hsv, const Mask* background,
                               const MaskInterval& interval) {
  ColorMaskResult out{Mask(hsv.width(), hsv.height()), 0.0};
  if (background && (background->width() != hsv.width() || background->height() != hsv.height()))
    throw std::invalid_argument("background mask does not match frame dimensions");
  auto src = hsv.pixels();
  auto dst = out.pass.pixels();
  std::size_t passed = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (background && background->pixels()[i]) continue;
    const ColorHSV& c = src[i];
    // Saturation and value bounds are cheap and reject most pixels.
    if (c.s < interval.s_lo || c.s > interval.s_hi || c.v < interval.v_lo || c.v > interval.v_hi)
      continue;
    if (color_in_interval(c, interval)) {
      dst[i] = 1;
      ++passed;
    }
  }
  out.pass_fraction = static_cast<double>(passed) / static_cast<double>(src.size());
  return out;
}

ColorMaskResult apply_color_mask(const Frame& frame, const BackgroundEstimate& background,
                                 const MaskInterval& interval) {
  return threshold_impl(frame, &background.mask, interval);
}

ColorMaskResult color_threshold(const Frame& frame, const MaskInterval& interval) {
  return threshold_impl(frame, nullptr, interval);
}

Components connected_components(const Mask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Components out{Raster<int>(w, h, 0), {}};
  std::vector<std::size_t> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y) || out.labels(x, y)) continue;
      const int label = static_cast<int>(out.pixels.size()) + 1;
      auto& members = out.pixels.emplace_back();
      out.labels(x, y) = label;
      stack.assign(1, static_cast<std::size_t>(y) * w + x);
      while (!stack.empty()) {
        const std::size_t idx = stack.back();
        stack.pop_back();
        members.push_back(idx);
        const int px = static_cast<int>(idx % w);
        const int py = static_cast<int>(idx / w);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx;
            const int ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (!mask(nx, ny) || out.labels(nx, ny)) continue;
            out.labels(nx, ny) = label;
            stack.push_back(static_cast<std::size_t>(ny) * w + nx);
          }
        }
      }
      std::sort(members.begin(), members.end());
    }
  }
  return out;
}

int log_kernel_radius(double sigma) { return static_cast<int>(std::ceil(4.0 * sigma)); }

namespace {

struct LogTaps {
  int radius;
  std::vector<double> g;   // Gaussian
  std::vector<double> g2;  // its second derivative
};

LogTaps make_log_taps(double sigma) {
  LogTaps t{log_kernel_radius(sigma), {}, {}};
  const double norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * sigma);
  const double s2 = sigma * sigma;
  for (int u = -t.radius; u <= t.radius; ++u) {
    const double g = norm * std::exp(-0.5 * u * u / s2);
    t.g.push_back(g);
    t.g2.push_back((u * u / (s2 * s2) - 1.0 / s2) * g);
  }
  return t;
}

struct Roi {
  int x0, y0, x1, y1;  // inclusive
  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
};

// Response -sigma^2 (g'' (x) g + g (x) g'') * mask over the ROI.
std::vector<double> log_response_roi(const Mask& mask, const Roi& roi, double sigma,
                                     const LogTaps& taps) {
  const int w = mask.width();
  const int h = mask.height();
  const int r = taps.radius;
  const int cx0 = std::max(0, roi.x0 - r);
  const int cx1 = std::min(w - 1, roi.x1 + r);
  const int cols = cx1 - cx0 + 1;
  const int rows = roi.height();

  std::vector<double> smooth(static_cast<std::size_t>(cols) * rows, 0.0);
  std::vector<double> curve(static_cast<std::size_t>(cols) * rows, 0.0);
  for (int y = roi.y0; y <= roi.y1; ++y) {
    const int vlo = std::max(-r, y - (h - 1));
    const int vhi = std::min(r, y);
    for (int x = cx0; x <= cx1; ++x) {
      double a = 0.0, b = 0.0;
      for (int v = vlo; v <= vhi; ++v) {
        if (!mask(x, y - v)) continue;
        a += taps.g[v + r];
        b += taps.g2[v + r];
      }
      const std::size_t k = static_cast<std::size_t>(y - roi.y0) * cols + (x - cx0);
      smooth[k] = a;
      curve[k] = b;
    }
  }

  std::vector<double> out(static_cast<std::size_t>(roi.width()) * rows);
  const double s2 = sigma * sigma;
  for (int y = 0; y < rows; ++y) {
    for (int x = roi.x0; x <= roi.x1; ++x) {
      double acc = 0.0;
      const int ulo = std::max(-r, x - cx1);
      const int uhi = std::min(r, x - cx0);
      for (int u = ulo; u <= uhi; ++u) {
        const std::size_t k = static_cast<std::size_t>(y) * cols + (x - u - cx0);
        acc += smooth[k] * taps.g2[u + r] + curve[k] * taps.g[u + r];
      }
      out[static_cast<std::size_t>(y) * roi.width() + (x - roi.x0)] = -s2 * acc;
    }
  }
  return out;
}

}  // namespace

std::vector<Blob> log_blob_detect(const Mask& mask, std::span<const double> sigmas_in,
                                  double min_response) {
  if (sigmas_in.empty()) throw std::invalid_argument("at least one LoG sigma is required");
  if (min_response < 0.0) throw std::invalid_argument("min_response must be nonnegative");
  std::vector<double> sigmas(sigmas_in.begin(), sigmas_in.end());
  for (double s : sigmas)
    if (!(s > 0.0)) throw std::invalid_argument("LoG sigmas must be positive");
  std::sort(sigmas.begin(), sigmas.end());
  sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());

  std::vector<LogTaps> taps;
  for (double s : sigmas) taps.push_back(make_log_taps(s));

  const int w = mask.width();
  const int h = mask.height();
  const auto comps = connected_components(mask);
  const int nscales = static_cast<int>(sigmas.size());

  std::vector<Blob> blobs;
  for (const auto& members : comps.pixels) {
    Roi roi{w, h, -1, -1};
    double sx = 0.0, sy = 0.0;
    for (std::size_t idx : members) {
      const int x = static_cast<int>(idx % w);
      const int y = static_cast<int>(idx / w);
      roi.x0 = std::min(roi.x0, x);
      roi.x1 = std::max(roi.x1, x);
      roi.y0 = std::min(roi.y0, y);
      roi.y1 = std::max(roi.y1, y);
      sx += x;
      sy += y;
    }
    roi = {std::max(0, roi.x0 - 1), std::max(0, roi.y0 - 1), std::min(w - 1, roi.x1 + 1),
           std::min(h - 1, roi.y1 + 1)};

    std::vector<std::vector<double>> resp;
    resp.reserve(nscales);
    for (int k = 0; k < nscales; ++k) resp.push_back(log_response_roi(mask, roi, sigmas[k], taps[k]));
    auto at = [&](int k, int x, int y) {
      return resp[k][static_cast<std::size_t>(y - roi.y0) * roi.width() + (x - roi.x0)];
    };

    bool found = false;
    Blob best;
    for (std::size_t idx : members) {
      const int x = static_cast<int>(idx % w);
      const int y = static_cast<int>(idx / w);
      for (int k = 0; k < nscales; ++k) {
        const double val = at(k, x, y);
        if (val <= min_response) continue;
        if (found && val <= best.response) continue;
        bool is_max = true;
        for (int dk = -1; dk <= 1 && is_max; ++dk) {
          const int kk = k + dk;
          if (kk < 0 || kk >= nscales) continue;
          for (int dy = -1; dy <= 1 && is_max; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const int nx = x + dx;
              const int ny = y + dy;
              if (nx < roi.x0 || ny < roi.y0 || nx > roi.x1 || ny > roi.y1) continue;
              if (at(kk, nx, ny) > val) {
                is_max = false;
                break;
              }
            }
          }
        }
        if (!is_max) continue;
        found = true;
        best.response = val;
        best.scale = sigmas[k];
        best.peak_x = x;
        best.peak_y = y;
      }
    }
    if (!found) continue;
    const double n = static_cast<double>(members.size());
    best.cx = sx / n;
    best.cy = sy / n;
    best.area = static_cast<int>(members.size());
    blobs.push_back(best);
  }
  return blobs;
}

std::vector<Blob> area_filter(std::span<const Blob> blobs, int min_area) {
  std::vector<Blob> out;
  std::copy_if(blobs.begin(), blobs.end(), std::back_inserter(out),
               [min_area](const Blob& b) { return b.area >= min_area; });
  return out;
}

bool is_marker_triangle(const Eigen::Vector2d& apex, const Eigen::Vector2d& a,
                        const Eigen::Vector2d& b, double aspect, double ratio_tol,
                        double angle_tol_deg) {
  const Eigen::Vector2d la = a - apex;
  const Eigen::Vector2d lb = b - apex;
  const double na = la.norm();
  const double nb = lb.norm();
  if (na <= 0.0 || nb <= 0.0) return false;
  const double cosine = std::clamp(la.dot(lb) / (na * nb), -1.0, 1.0);
  const double angle = std::acos(cosine) * 180.0 / std::numbers::pi;
  if (std::fabs(angle - 90.0) > angle_tol_deg) return false;
  const double ratio = std::max(na, nb) / std::min(na, nb);
  return ratio >= aspect / ratio_tol && ratio <= aspect * ratio_tol;
}

std::vector<SpatialCandidate> spatial_filter(std::span<const Blob> blobs,
                                             const MarkerGeometry& geometry, double ratio_tol,
                                             double angle_tol_deg) {
  if (!(ratio_tol > 0.0) || !(angle_tol_deg > 0.0))
    throw std::invalid_argument("spatial filter tolerances must be positive");
  const double aspect = geometry.aspect();
  const std::size_t n = blobs.size();
  auto pt = [&](std::size_t i) { return Eigen::Vector2d(blobs[i].cx, blobs[i].cy); };

  // Qualifying triangles grouped by hypotenuse (lo, hi); each entry records
  // the apex and which hypotenuse end the long leg attaches to.
  struct Triangle {
    std::size_t apex;
    std::size_t long_end;
  };
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Triangle>> by_hypotenuse;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const std::array<std::size_t, 3> tri = {i, j, k};
        for (int a = 0; a < 3; ++a) {
          const std::size_t apex = tri[a];
          const std::size_t p = tri[(a + 1) % 3];
          const std::size_t q = tri[(a + 2) % 3];
          if (!is_marker_triangle(pt(apex), pt(p), pt(q), aspect, ratio_tol, angle_tol_deg))
            continue;
          const std::size_t long_end = (pt(p) - pt(apex)).norm() >= (pt(q) - pt(apex)).norm() ? p : q;
          by_hypotenuse[{std::min(p, q), std::max(p, q)}].push_back({apex, long_end});
        }
      }
    }
  }

  auto side = [&](std::size_t p, std::size_t q, std::size_t r) {
    const Eigen::Vector2d d = pt(q) - pt(p);
    const Eigen::Vector2d e = pt(r) - pt(p);
    return d.x() * e.y() - d.y() * e.x();
  };

  std::map<std::array<std::size_t, 4>, double> unique;
  for (const auto& [hyp, tris] : by_hypotenuse) {
    for (std::size_t s = 0; s < tris.size(); ++s) {
      for (std::size_t t = s + 1; t < tris.size(); ++t) {
        const auto& t1 = tris[s];
        const auto& t2 = tris[t];
        if (t1.apex == t2.apex || t1.long_end == t2.long_end) continue;
        if (side(hyp.first, hyp.second, t1.apex) * side(hyp.first, hyp.second, t2.apex) >= 0.0)
          continue;
        std::array<std::size_t, 4> set = {hyp.first, hyp.second, t1.apex, t2.apex};
        std::sort(set.begin(), set.end());
        double total = 0.0;
        for (auto i : set) total += blobs[i].response;
        unique.emplace(set, total);
      }
    }
  }

  std::vector<SpatialCandidate> out;
  out.reserve(unique.size());
  for (const auto& [set, total] : unique) out.push_back({set, total});
  return out;
}

std::optional<SpatialCandidate> best_candidate(std::span<const SpatialCandidate> candidates,
                                               std::span<const Blob> blobs) {
  if (candidates.empty()) return std::nullopt;
  auto key = [&](const SpatialCandidate& c) {
    std::array<std::pair<double, double>, 4> pts;
    for (int i = 0; i < 4; ++i) pts[i] = {blobs[c.indices[i]].cx, blobs[c.indices[i]].cy};
    std::sort(pts.begin(), pts.end());
    return pts;
  };
  const SpatialCandidate* best = &candidates.front();
  for (const auto& c : candidates.subspan(1)) {
    if (c.total_response > best->total_response ||
        (c.total_response == best->total_response && key(c) < key(*best)))
      best = &c;
  }
  return *best;
}

std::optional<LandmarkDetection> assign_correspondence(const std::array<Blob, 4>& blobs) {
  std::array<Blob, 4> sorted = blobs;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Blob& a, const Blob& b) { return a.cy < b.cy; });
  auto [tl, tr] = sorted[0].cx <= sorted[1].cx ? std::pair{sorted[0], sorted[1]}
                                               : std::pair{sorted[1], sorted[0]};
  auto [bl, br] = sorted[2].cx <= sorted[3].cx ? std::pair{sorted[2], sorted[3]}
                                               : std::pair{sorted[3], sorted[2]};
  const bool ordered = tl.cx < tr.cx && bl.cx < br.cx && tl.cy < bl.cy && tr.cy < br.cy;
  if (!ordered) return std::nullopt;
  LandmarkDetection det;
  det.corners = {tl, tr, bl, br};
  return det;
}

}  // namespace dockvision
