#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/core/random.hpp"
#include "hfl/market/geometry.hpp"

namespace hfl {

struct GeometryParams {
  int min_rooms = 1;
  int max_rooms = 6;
  double corridor_probability = 0.5;
  // Per-listing probability that a window slot is glazed is drawn from this range.
  double window_density_min = 0.0;
  double window_density_max = 1.0;
  // Footprint aspect ratio range.
  double elongation_min = 1.0;
  double elongation_max = 1.8;
  // Per-listing probability of cutting a cell across its short side, which
  // produces strip-like rooms, is drawn from [0, strip_split_max].
  double strip_split_max = 0.7;
  double wall_thickness = 0.12;
  double corridor_width = 1.2;
  double window_length = 1.2;
  double window_gap = 0.5;
  double door_width = 0.9;
  double balcony_probability = 0.4;
  double min_room_area = 6.0;
  double min_band_depth = 2.2;
};

namespace detail {

inline std::vector<Rect> split_run(const Rect& band, int k, bool along_x, Rng& rng) {
  std::vector<double> weights(k);
  double total = 0.0;
  for (double& w : weights) total += (w = rng.uniform(0.7, 1.3));
  std::vector<Rect> out;
  double cursor = along_x ? band.x0 : band.y0;
  const double length = along_x ? band.width() : band.height();
  for (int i = 0; i < k; ++i) {
    const double next = i + 1 == k ? (along_x ? band.x1 : band.y1) : cursor + length * weights[i] / total;
    out.push_back(along_x ? Rect{cursor, band.y0, next, band.y1} : Rect{band.x0, cursor, band.x1, next});
    cursor = next;
  }
  return out;
}

inline void guillotine(const Rect& r, int k, double strip_p, Rng& rng, std::vector<Rect>& out) {
  if (k == 1) {
    out.push_back(r);
    return;
  }
  bool cut_x = r.width() >= r.height();  // cut perpendicular to the long side
  if (rng.bernoulli(strip_p)) cut_x = !cut_x;
  const int k1 = k / 2;
  const double frac = std::clamp(static_cast<double>(k1) / k * rng.uniform(0.85, 1.15), 0.2, 0.8);
  if (cut_x) {
    const double xm = r.x0 + frac * r.width();
    guillotine({r.x0, r.y0, xm, r.y1}, k1, strip_p, rng, out);
    guillotine({xm, r.y0, r.x1, r.y1}, k - k1, strip_p, rng, out);
  } else {
    const double ym = r.y0 + frac * r.height();
    guillotine({r.x0, r.y0, r.x1, ym}, k1, strip_p, rng, out);
    guillotine({r.x0, ym, r.x1, r.y1}, k - k1, strip_p, rng, out);
  }
}

// Shared boundary of two touching cells, if any.
inline std::optional<Segment> shared_edge(const Rect& a, const Rect& b, double eps = 1e-9) {
  auto overlap = [](double a0, double a1, double b0, double b1) {
    return std::pair{std::max(a0, b0), std::min(a1, b1)};
  };
  if (std::abs(a.x1 - b.x0) < eps || std::abs(b.x1 - a.x0) < eps) {
    const double x = std::abs(a.x1 - b.x0) < eps ? a.x1 : a.x0;
    auto [lo, hi] = overlap(a.y0, a.y1, b.y0, b.y1);
    if (hi - lo > eps) return Segment{{x, lo}, {x, hi}};
  }
  if (std::abs(a.y1 - b.y0) < eps || std::abs(b.y1 - a.y0) < eps) {
    const double y = std::abs(a.y1 - b.y0) < eps ? a.y1 : a.y0;
    auto [lo, hi] = overlap(a.x0, a.x1, b.x0, b.x1);
    if (hi - lo > eps) return Segment{{lo, y}, {hi, y}};
  }
  return std::nullopt;
}

// Door of the given width centered near the middle of an edge.
inline Segment door_on(const Segment& edge, double width, Rng& rng) {
  const double len = edge.length();
  const double w = std::min(width, 0.8 * len);
  const double slack = std::max(0.0, (len - w) / 2.0 - 0.15);
  const double mid = len / 2.0 + rng.uniform(-1.0, 1.0) * slack;
  if (edge.horizontal()) {
    const double x0 = std::min(edge.a.x, edge.b.x);
    return {{x0 + mid - w / 2, edge.a.y}, {x0 + mid + w / 2, edge.a.y}};
  }
  const double y0 = std::min(edge.a.y, edge.b.y);
  return {{edge.a.x, y0 + mid - w / 2}, {edge.a.x, y0 + mid + w / 2}};
}

inline bool segments_overlap(const Segment& s, const Segment& t) {
  if (s.horizontal() != t.horizontal()) return false;
  if (s.horizontal()) {
    if (s.a.y != t.a.y) return false;
    return std::min(std::max(s.a.x, s.b.x), std::max(t.a.x, t.b.x)) >
           std::max(std::min(s.a.x, s.b.x), std::min(t.a.x, t.b.x));
  }
  if (s.a.x != t.a.x) return false;
  return std::min(std::max(s.a.y, s.b.y), std::max(t.a.y, t.b.y)) >
         std::max(std::min(s.a.y, s.b.y), std::min(t.a.y, t.b.y));
}

// Sides of a cell lying on the rectangular footprint boundary.
inline std::vector<Segment> exterior_sides(const Rect& c, const Rect& fp, double eps = 1e-9) {
  std::vector<Segment> sides;
  if (std::abs(c.y0 - fp.y0) < eps) sides.push_back({{c.x0, c.y0}, {c.x1, c.y0}});
  if (std::abs(c.x1 - fp.x1) < eps) sides.push_back({{c.x1, c.y0}, {c.x1, c.y1}});
  if (std::abs(c.y1 - fp.y1) < eps) sides.push_back({{c.x0, c.y1}, {c.x1, c.y1}});
  if (std::abs(c.x0 - fp.x0) < eps) sides.push_back({{c.x0, c.y0}, {c.x0, c.y1}});
  return sides;
}

}  // namespace detail

// Procedural floor plan whose room areas sum to `area`. Layouts are either a
// guillotine partition of a rectangular footprint or two bands of rooms along
// a corridor, optionally closed by rooms beyond the corridor's end.
inline FloorPlanGeometry synth_geometry(Rng& rng, double area, int rooms, const GeometryParams& params) {
  require(area > 0.0 && std::isfinite(area), ErrorKind::InvalidArgument, "area must be positive");
  require(rooms >= 1, ErrorKind::InvalidArgument, "rooms must be >= 1");
  if (area / rooms < params.min_room_area)
    fail(ErrorKind::GeometryInfeasible, std::to_string(rooms) + " rooms cannot fit in " +
                                            std::to_string(area) + " m2");

  const double aspect = rng.uniform(params.elongation_min, params.elongation_max);
  const double strip_p = rng.uniform(0.0, params.strip_split_max);
  const double window_p = rng.uniform(params.window_density_min, params.window_density_max);
  const double W = std::sqrt(area * aspect);
  const double H = std::sqrt(area / aspect);
  const double cw = params.corridor_width;

  std::vector<Rect> cells;
  std::optional<Rect> corridor_cell;
  const bool want_corridor = rooms >= 2 && rng.bernoulli(params.corridor_probability);
  if (want_corridor) {
    double L = W * rng.uniform(0.35, 1.0);
    const bool right_region = W - L >= params.min_band_depth;
    if (!right_region) L = W;
    const int k3 = right_region ? (rooms >= 5 ? 2 : 1) : 0;
    const int rest = rooms - k3;
    const int k1 = (rest + 1) / 2;
    const int k2 = rest - k1;
    const double need = cw + params.min_band_depth * (k2 > 0 ? 2 : 1);
    if (rest >= 1 && H >= need) {
      const double yc = k2 > 0 ? params.min_band_depth + (H - need) * rng.uniform(0.3, 0.7) : H - cw;
      for (const auto& c : detail::split_run({0, 0, L, yc}, k1, true, rng)) cells.push_back(c);
      if (k2 > 0)
        for (const auto& c : detail::split_run({0, yc + cw, L, H}, k2, true, rng)) cells.push_back(c);
      if (k3 > 0)
        for (const auto& c : detail::split_run({L, 0, W, H}, k3, false, rng)) cells.push_back(c);
      corridor_cell = Rect{0, yc, L, yc + cw};
    }
  }
  if (!corridor_cell) detail::guillotine({0, 0, W, H}, rooms, strip_p, rng, cells);

  // Uniform scale s so that sum (s*w - t)(s*h - t) = area.
  const double t = params.wall_thickness;
  double a2 = 0.0, a1 = 0.0;
  for (const auto& c : cells) {
    a2 += c.area();
    a1 += c.width() + c.height();
  }
  const double a0 = static_cast<double>(cells.size()) * t * t - area;
  const double s = (t * a1 + std::sqrt(t * t * a1 * a1 - 4.0 * a2 * a0)) / (2.0 * a2);
  auto scaled = [s](const Rect& r) { return Rect{r.x0 * s, r.y0 * s, r.x1 * s, r.y1 * s}; };
  for (auto& c : cells) {
    c = scaled(c);
    if (c.width() <= 2 * t || c.height() <= 2 * t)
      fail(ErrorKind::GeometryInfeasible, "room thinner than its walls");
  }
  if (corridor_cell) corridor_cell = scaled(*corridor_cell);
  const Rect fp{0, 0, W * s, H * s};

  FloorPlanGeometry g;
  g.wall_thickness = t;
  g.footprint = rect_polygon(fp);
  for (const auto& c : cells) g.rooms.push_back(c.expanded(-t / 2));
  if (corridor_cell) {
    const double ym = (corridor_cell->y0 + corridor_cell->y1) / 2;
    g.corridor = Corridor{{{corridor_cell->x0, ym}, {corridor_cell->x1, ym}}, corridor_cell->height()};
  }

  // Doors: spanning tree over cells (corridor first), breadth-first.
  std::vector<Rect> nodes;
  if (corridor_cell) nodes.push_back(*corridor_cell);
  nodes.insert(nodes.end(), cells.begin(), cells.end());
  std::vector<bool> seen(nodes.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (seen[v]) continue;
      const auto edge = detail::shared_edge(nodes[u], nodes[v]);
      if (!edge || edge->length() < params.door_width + 0.3) continue;
      seen[v] = true;
      queue.push_back(v);
      g.doors.push_back(detail::door_on(*edge, params.door_width, rng));
    }
  }
  std::optional<Segment> entrance;
  if (corridor_cell) {
    entrance = detail::door_on({{0, corridor_cell->y0}, {0, corridor_cell->y1}}, params.door_width, rng);
  } else {
    const auto sides = detail::exterior_sides(cells[0], fp);
    if (!sides.empty()) entrance = detail::door_on(sides.back(), params.door_width, rng);
  }
  if (entrance) g.doors.push_back(*entrance);

  // Windows on exterior sides at evenly spaced slots.
  const double wl = params.window_length;
  for (const auto& c : cells) {
    for (const auto& side : detail::exterior_sides(c, fp)) {
      const double len = side.length();
      const int slots = static_cast<int>(std::floor((len - params.window_gap) / (wl + params.window_gap)));
      for (int i = 0; i < slots; ++i) {
        if (!rng.bernoulli(window_p)) continue;
        const double mid = (i + 0.5) * len / slots;
        Segment w = side.horizontal()
                        ? Segment{{std::min(side.a.x, side.b.x) + mid - wl / 2, side.a.y},
                                  {std::min(side.a.x, side.b.x) + mid + wl / 2, side.a.y}}
                        : Segment{{side.a.x, std::min(side.a.y, side.b.y) + mid - wl / 2},
                                  {side.a.x, std::min(side.a.y, side.b.y) + mid + wl / 2}};
        if (entrance && detail::segments_overlap(w, *entrance)) continue;
        g.windows.push_back(w);
      }
    }
  }

  if (rng.bernoulli(params.balcony_probability)) {
    for (const auto& c : cells) {
      const bool top = std::abs(c.y0 - fp.y0) < 1e-9;
      const bool bottom = std::abs(c.y1 - fp.y1) < 1e-9;
      if ((!top && !bottom) || c.width() < 2.5) continue;
      const double len = std::min(3.5, c.width() - 0.6);
      const double x0 = c.x0 + (c.width() - len) / 2;
      const double depth = 1.4;
      g.balcony = top ? Rect{x0, fp.y0 - depth, x0 + len, fp.y0} : Rect{x0, fp.y1, x0 + len, fp.y1 + depth};
      break;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Layout quality: the planted, image-visible driver of adjusted rent.

struct QualityWeights {
  double window = 0.35;
  double corridor = -0.30;
  double elongation = -0.20;
  double open_living = 0.15;
};

// Raw-feature values that map to component score +1 (the minimum maps to -1).
struct QualityScales {
  double window_full = 0.4;     // glazed fraction of the exterior perimeter
  double aspect_full = 3.0;     // mean room aspect ratio
  double dominance_full = 1.8;  // largest room area / mean room area
};

// Each component maps its raw feature affinely onto [-1, 1], higher meaning
// "more of the feature"; the signed weights carry its effect on price.
struct LayoutQuality {
  double q = 0.0;
  double window_score = 0.0;
  double corridor_score = 0.0;
  double elongation_score = 0.0;
  double open_living_score = 0.0;
};

inline LayoutQuality layout_quality(const FloorPlanGeometry& g, const QualityWeights& w = {},
                                    const QualityScales& scales = {}) {
  auto unit = [](double v) { return std::clamp(v, -1.0, 1.0); };
  LayoutQuality lq;

  const double perimeter = polygon_perimeter(g.footprint);
  double glazed = 0.0;
  for (const auto& win : g.windows) glazed += win.length();
  const double density = perimeter > 0.0 ? glazed / perimeter : 0.0;
  lq.window_score = unit(2.0 * density / scales.window_full - 1.0);

  const Rect box = bounding_box(g.footprint);
  const double long_side = std::max(box.width(), box.height());
  const double ratio = g.corridor && long_side > 0.0 ? g.corridor->length() / long_side : 0.0;
  lq.corridor_score = unit(2.0 * ratio - 1.0);

  double aspect_sum = 0.0, area_sum = 0.0, area_max = 0.0;
  for (const auto& r : g.rooms) {
    aspect_sum += r.aspect();
    area_sum += r.area();
    area_max = std::max(area_max, r.area());
  }
  const double n = static_cast<double>(g.rooms.size());
  const double mean_aspect = n > 0 ? aspect_sum / n : 1.0;
  lq.elongation_score = unit(2.0 * (mean_aspect - 1.0) / (scales.aspect_full - 1.0) - 1.0);
  const double dominance = area_sum > 0.0 ? area_max / (area_sum / n) : 1.0;
  lq.open_living_score = unit(2.0 * (dominance - 1.0) / (scales.dominance_full - 1.0) - 1.0);

  lq.q = unit(w.window * lq.window_score + w.corridor * lq.corridor_score +
              w.elongation * lq.elongation_score + w.open_living * lq.open_living_score);
  return lq;
}

}  // namespace hfl
