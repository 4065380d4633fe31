#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace hfl {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// Axis-aligned rectangle in meters, [x0, x1] x [y0, y1].
struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double aspect() const {
    const double lo = std::min(width(), height());
    return lo > 0.0 ? std::max(width(), height()) / lo : 0.0;
  }
  Rect expanded(double d) const { return {x0 - d, y0 - d, x1 + d, y1 + d}; }
  bool operator==(const Rect&) const = default;
};

inline bool interiors_overlap(const Rect& a, const Rect& b, double tol = 1e-9) {
  return std::min(a.x1, b.x1) - std::max(a.x0, b.x0) > tol &&
         std::min(a.y1, b.y1) - std::max(a.y0, b.y0) > tol;
}

// Axis-aligned segment.
struct Segment {
  Point a;
  Point b;

  double length() const { return std::hypot(b.x - a.x, b.y - a.y); }
  bool horizontal() const { return a.y == b.y; }
  bool operator==(const Segment&) const = default;
};

struct Corridor {
  std::vector<Point> polyline;
  double width = 0.0;

  double length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i)
      total += std::hypot(polyline[i].x - polyline[i - 1].x, polyline[i].y - polyline[i - 1].y);
    return total;
  }
  bool operator==(const Corridor&) const = default;
};

// Vector floor plan. Rooms are the clear interiors; walls of thickness
// wall_thickness are centered on the room cell boundaries.
struct FloorPlanGeometry {
  std::vector<Point> footprint;  // rectilinear polygon
  std::vector<Rect> rooms;
  std::optional<Corridor> corridor;
  std::vector<Segment> doors;
  std::vector<Segment> windows;
  std::optional<Rect> balcony;
  double wall_thickness = 0.12;

  bool operator==(const FloorPlanGeometry&) const = default;
};

inline Rect bounding_box(const std::vector<Point>& pts) {
  if (pts.empty()) return {};
  Rect r{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
  for (const auto& p : pts) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

inline double polygon_area(const std::vector<Point>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    twice += p.x * q.y - q.x * p.y;
  }
  return std::abs(twice) / 2.0;
}

inline double polygon_perimeter(const std::vector<Point>& poly) {
  double total = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    total += std::hypot(q.x - p.x, q.y - p.y);
  }
  return total;
}

// Even-odd test; points on the boundary count as inside.
inline bool point_in_polygon(const std::vector<Point>& poly, Point p, double tol = 1e-9) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (std::abs(cross) <= tol * std::max(1.0, std::hypot(b.x - a.x, b.y - a.y)) &&
        p.x >= std::min(a.x, b.x) - tol && p.x <= std::max(a.x, b.x) + tol &&
        p.y >= std::min(a.y, b.y) - tol && p.y <= std::max(a.y, b.y) + tol)
      return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
      inside = !inside;
  }
  return inside;
}

inline std::vector<Point> rect_polygon(const Rect& r) {
  return {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
}

inline double total_room_area(const FloorPlanGeometry& g) {
  double total = 0.0;
  for (const auto& r : g.rooms) total += r.area();
  return total;
}

// True when rooms are pairwise interior-disjoint and inside the footprint.
inline bool rooms_consistent(const FloorPlanGeometry& g) {
  for (std::size_t i = 0; i < g.rooms.size(); ++i) {
    for (std::size_t j = i + 1; j < g.rooms.size(); ++j)
      if (interiors_overlap(g.rooms[i], g.rooms[j])) return false;
    for (const auto& corner : rect_polygon(g.rooms[i]))
      if (!point_in_polygon(g.footprint, corner, 1e-7)) return false;
  }
  return true;
}

}  // namespace hfl
