#pragma once

#include <algorithm>
#include <cmath>

#include "hfl/core/error.hpp"
#include "hfl/image/gray_image.hpp"
#include "hfl/market/geometry.hpp"

namespace hfl {

inline constexpr int kRasterMargin = 2;
inline constexpr std::uint8_t kInk = 0;
inline constexpr std::uint8_t kPaper = 255;

// Maps plan coordinates (m) onto pixel boundaries. The plan's bounding box is
// scaled to fit size - 2*margin pixels and centered.
struct PlanTransform {
  double scale = 1.0;
  double ox = 0.0, oy = 0.0;
  double bx = 0.0, by = 0.0;

  int px(double x) const { return static_cast<int>(std::lround(ox + (x - bx) * scale)); }
  int py(double y) const { return static_cast<int>(std::lround(oy + (y - by) * scale)); }
};

inline PlanTransform plan_transform(const FloorPlanGeometry& g, int size) {
  std::vector<Point> pts = g.footprint;
  if (g.balcony) {
    const auto b = rect_polygon(*g.balcony);
    pts.insert(pts.end(), b.begin(), b.end());
  }
  const Rect box = bounding_box(pts);
  const double span = std::max(box.width(), box.height());
  const double usable = size - 2.0 * kRasterMargin;
  PlanTransform t;
  t.scale = span > 0.0 ? usable / span : 1.0;
  t.bx = box.x0;
  t.by = box.y0;
  t.ox = kRasterMargin + (usable - box.width() * t.scale) / 2.0;
  t.oy = kRasterMargin + (usable - box.height() * t.scale) / 2.0;
  return t;
}

namespace detail {

inline void fill_block(GrayImage& img, int x0, int y0, int x1, int y1, std::uint8_t v) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, img.width - 1);
  y1 = std::min(y1, img.height - 1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) img.at(x, y) = v;
}

// Two-pixel wall band centered on the pixel boundary of an axis-aligned line.
inline void wall_line(GrayImage& img, const PlanTransform& t, Point a, Point b, std::uint8_t v) {
  if (a.y == b.y) {
    const int Y = t.py(a.y);
    fill_block(img, std::min(t.px(a.x), t.px(b.x)) - 1, Y - 1, std::max(t.px(a.x), t.px(b.x)), Y, v);
  } else {
    const int X = t.px(a.x);
    fill_block(img, X - 1, std::min(t.py(a.y), t.py(b.y)) - 1, X, std::max(t.py(a.y), t.py(b.y)), v);
  }
}

}  // namespace detail

// White paper, 2-px dark walls, door gaps, double-stroke windows, thin
// balcony outline.
inline GrayImage rasterize(const FloorPlanGeometry& g, int size) {
  require(size >= 16, ErrorKind::InvalidArgument, "raster size must be >= 16");
  GrayImage img(size, size, kPaper);
  if (g.footprint.size() < 3) return img;
  const PlanTransform t = plan_transform(g, size);

  for (std::size_t i = 0; i < g.footprint.size(); ++i)
    detail::wall_line(img, t, g.footprint[i], g.footprint[(i + 1) % g.footprint.size()], kInk);
  for (const auto& room : g.rooms) {
    const Rect c = room.expanded(g.wall_thickness / 2);
    const auto poly = rect_polygon(c);
    for (std::size_t i = 0; i < 4; ++i) detail::wall_line(img, t, poly[i], poly[(i + 1) % 4], kInk);
  }

  for (const auto& d : g.doors) {
    if (d.horizontal()) {
      const int Y = t.py(d.a.y);
      detail::fill_block(img, std::min(t.px(d.a.x), t.px(d.b.x)), Y - 1,
                         std::max(t.px(d.a.x), t.px(d.b.x)) - 1, Y, kPaper);
    } else {
      const int X = t.px(d.a.x);
      detail::fill_block(img, X - 1, std::min(t.py(d.a.y), t.py(d.b.y)), X,
                         std::max(t.py(d.a.y), t.py(d.b.y)) - 1, kPaper);
    }
  }

  for (const auto& w : g.windows) {
    if (w.horizontal()) {
      const int Y = t.py(w.a.y);
      const int x0 = std::min(t.px(w.a.x), t.px(w.b.x));
      const int x1 = std::max(t.px(w.a.x), t.px(w.b.x)) - 1;
      detail::fill_block(img, x0, Y - 1, x1, Y, kPaper);
      detail::fill_block(img, x0, Y - 2, x1, Y - 2, kInk);
      detail::fill_block(img, x0, Y + 1, x1, Y + 1, kInk);
    } else {
      const int X = t.px(w.a.x);
      const int y0 = std::min(t.py(w.a.y), t.py(w.b.y));
      const int y1 = std::max(t.py(w.a.y), t.py(w.b.y)) - 1;
      detail::fill_block(img, X - 1, y0, X, y1, kPaper);
      detail::fill_block(img, X - 2, y0, X - 2, y1, kInk);
      detail::fill_block(img, X + 1, y0, X + 1, y1, kInk);
    }
  }

  if (g.balcony) {
    const int x0 = t.px(g.balcony->x0), x1 = t.px(g.balcony->x1) - 1;
    const int y0 = t.py(g.balcony->y0), y1 = t.py(g.balcony->y1) - 1;
    detail::fill_block(img, x0, y0, x1, y0, kInk);
    detail::fill_block(img, x0, y1, x1, y1, kInk);
    detail::fill_block(img, x0, y0, x0, y1, kInk);
    detail::fill_block(img, x1, y0, x1, y1, kInk);
  }
  return img;
}

}  // namespace hfl
