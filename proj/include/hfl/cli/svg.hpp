#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace hfl::cli {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Minimal SVG document built from lines, circles, polylines and text.
class Svg {
 public:
  Svg(double width, double height) : w_(width), h_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string& stroke = "black", double width = 1.0,
            const std::string& extra = "") {
    body_ += "<line x1=\"" + fmt2(x1) + "\" y1=\"" + fmt2(y1) + "\" x2=\"" + fmt2(x2) + "\" y2=\"" + fmt2(y2) +
             "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt2(width) + "\"" + extra + "/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill = "black") {
    body_ += "<circle cx=\"" + fmt2(cx) + "\" cy=\"" + fmt2(cy) + "\" r=\"" + fmt2(r) + "\" fill=\"" + fill + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke = "black") {
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ += (i ? " " : "") + fmt2(pts[i].first) + "," + fmt2(pts[i].second);
    body_ += "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor = "start", int size = 12) {
    body_ += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" font-family=\"sans-serif\" font-size=\"" +
             std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + xml_escape(s) + "</text>\n";
  }

  std::string str() const {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(w_) + "\" height=\"" + fmt2(h_) +
           "\" viewBox=\"0 0 " + fmt2(w_) + " " + fmt2(h_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
  }

 private:
  double w_, h_;
  std::string body_;
};

struct CoefficientRow {
  std::string name;
  double estimate = 0.0, se = 0.0;
};

inline constexpr double kCoefRowHeight = 18.0;

// One point-and-whisker row per coefficient; whiskers span estimate +/- z*se.
inline std::string coefficient_plot(const std::vector<CoefficientRow>& rows, const std::string& title, double z = 1.96) {
  const double left = 190, right = 30, top = 40, bottom = 40, plot_w = 420;
  const double height = top + bottom + kCoefRowHeight * static_cast<double>(std::max<std::size_t>(rows.size(), 1));
  Svg svg(left + plot_w + right, height);
  double lo = 0.0, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.estimate - z * r.se);
    hi = std::max(hi, r.estimate + z * r.se);
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto sx = [&](double v) { return left + (v - lo) / (hi - lo) * plot_w; };
  svg.text(left + plot_w / 2, 20, title, "middle", 14);
  svg.line(sx(0.0), top - 5, sx(0.0), height - bottom + 5, "gray", 1.0, " stroke-dasharray=\"4,3\"");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double y = top + kCoefRowHeight * (static_cast<double>(i) + 0.5);
    svg.text(left - 8, y + 4, r.name, "end", 11);
    svg.line(sx(r.estimate - z * r.se), y, sx(r.estimate + z * r.se), y, "steelblue", 2.0);
    svg.circle(sx(r.estimate), y, 3.5);
  }
  const double axis_y = height - bottom + 10;
  svg.line(left, axis_y, left + plot_w, axis_y);
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    svg.line(sx(v), axis_y, sx(v), axis_y + 4);
    svg.text(sx(v), axis_y + 16, fmt2(v), "middle", 10);
  }
  return svg.str();
}

// Step curve of P(X > x).
inline std::string ccdf_plot(const std::vector<double>& xs, const std::vector<double>& ps, const std::string& title,
                             const std::string& xlabel) {
  const double left = 60, right = 20, top = 40, bottom = 50, w = 480, h = 300;
  Svg svg(left + w + right, top + h + bottom);
  svg.text(left + w / 2, 20, title, "middle", 14);
  const double lo = xs.empty() ? 0.0 : xs.front(), hi = xs.empty() ? 1.0 : std::max(xs.back(), lo + 1e-12);
  auto sx = [&](double v) { return left + (v - lo) / (hi - lo) * w; };
  auto sy = [&](double p) { return top + (1.0 - p) * h; };
  svg.line(left, top + h, left + w, top + h);
  svg.line(left, top, left, top + h);
  for (int t = 0; t <= 4; ++t) {
    const double p = t / 4.0, v = lo + (hi - lo) * t / 4.0;
    svg.text(left - 6, sy(p) + 4, fmt2(p), "end", 10);
    svg.text(sx(v), top + h + 16, fmt2(v), "middle", 10);
  }
  svg.text(left + w / 2, top + h + 38, xlabel, "middle", 12);
  std::vector<std::pair<double, double>> pts;
  double prev = 1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts.push_back({sx(xs[i]), sy(prev)});
    pts.push_back({sx(xs[i]), sy(ps[i])});
    prev = ps[i];
  }
  svg.polyline(pts, "steelblue");
  return svg.str();
}

}  // namespace hfl::cli
