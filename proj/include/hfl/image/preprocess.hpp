#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/image/gray_image.hpp"

namespace hfl {

inline constexpr std::uint8_t kDefaultBackgroundThreshold = 250;

// Tight bounding box of the pixels darker than bg_threshold.
inline GrayImage crop_to_content(const GrayImage& img,
                                 std::uint8_t bg_threshold = kDefaultBackgroundThreshold) {
  validate(img);
  int x0 = img.width, y0 = img.height, x1 = -1, y1 = -1;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y) < bg_threshold) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
  }
  if (x1 < 0) fail(ErrorKind::DegenerateImage, "no content pixel darker than threshold");

  GrayImage out(x1 - x0 + 1, y1 - y0 + 1);
  for (int y = 0; y < out.height; ++y)
    std::copy_n(&img.pixels[static_cast<std::size_t>(y + y0) * img.width + x0], out.width,
                &out.pixels[static_cast<std::size_t>(y) * out.width]);
  return out;
}

namespace detail {

// Box-filter weights mapping src_len samples onto dst_len samples. Each output
// sample averages the source interval it covers, with fractional coverage at
// the ends. Identity when the lengths match.
struct AreaKernel {
  std::vector<int> first;
  std::vector<std::vector<double>> weights;
};

inline AreaKernel area_kernel(int src_len, int dst_len) {
  AreaKernel k;
  k.first.resize(dst_len);
  k.weights.resize(dst_len);
  const double ratio = static_cast<double>(src_len) / dst_len;
  for (int d = 0; d < dst_len; ++d) {
    const double lo = d * ratio;
    const double hi = (d + 1) * ratio;
    const int s0 = static_cast<int>(std::floor(lo));
    const int s1 = std::min(src_len - 1, static_cast<int>(std::ceil(hi)) - 1);
    k.first[d] = s0;
    double total = 0.0;
    for (int s = s0; s <= s1; ++s) {
      const double w = std::min<double>(hi, s + 1) - std::max<double>(lo, s);
      k.weights[d].push_back(std::max(0.0, w));
      total += std::max(0.0, w);
    }
    for (double& w : k.weights[d]) w /= total;
  }
  return k;
}

inline std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace detail

// Area-averaging resample to an arbitrary size.
inline GrayImage resample_area(const GrayImage& img, int new_width, int new_height) {
  validate(img);
  if (new_width == img.width && new_height == img.height) return img;
  const auto kx = detail::area_kernel(img.width, new_width);
  const auto ky = detail::area_kernel(img.height, new_height);

  std::vector<double> rows(static_cast<std::size_t>(img.height) * new_width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < new_width; ++x) {
      double acc = 0.0;
      const auto& w = kx.weights[x];
      for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * img.at(kx.first[x] + static_cast<int>(i), y);
      rows[static_cast<std::size_t>(y) * new_width + x] = acc;
    }
  }
  GrayImage out(new_width, new_height);
  for (int y = 0; y < new_height; ++y) {
    const auto& w = ky.weights[y];
    for (int x = 0; x < new_width; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * rows[static_cast<std::size_t>(ky.first[y] + static_cast<int>(i)) * new_width + x];
      out.at(x, y) = detail::to_byte(acc);
    }
  }
  return out;
}

// Placement of scaled content inside the letterbox canvas.
struct LetterboxPlacement {
  int offset_x = 0;
  int offset_y = 0;
  int content_width = 0;
  int content_height = 0;
};

inline LetterboxPlacement letterbox_placement(int width, int height, int side) {
  const double scale = static_cast<double>(side) / std::max(width, height);
  LetterboxPlacement p;
  p.content_width = std::clamp(static_cast<int>(std::lround(width * scale)), 1, side);
  p.content_height = std::clamp(static_cast<int>(std::lround(height * scale)), 1, side);
  p.offset_x = (side - p.content_width) / 2;
  p.offset_y = (side - p.content_height) / 2;
  return p;
}

// Aspect-preserving resize onto a side x side canvas filled with pure black.
inline GrayImage letterbox_resize(const GrayImage& img, int side) {
  require(side >= 1, ErrorKind::InvalidArgument, "letterbox side must be >= 1");
  validate(img);
  const auto p = letterbox_placement(img.width, img.height, side);
  const GrayImage content = resample_area(img, p.content_width, p.content_height);
  GrayImage out(side, side, 0);
  for (int y = 0; y < p.content_height; ++y)
    std::copy_n(&content.pixels[static_cast<std::size_t>(y) * content.width], content.width,
                &out.pixels[static_cast<std::size_t>(y + p.offset_y) * side + p.offset_x]);
  return out;
}

// (v - min) / (max - min); a constant image maps to zeros.
inline ImageTensor minmax_normalize(const GrayImage& img) {
  validate(img);
  require(img.width == img.height, ErrorKind::InvalidArgument,
          "minmax_normalize expects a square image");
  const auto [lo_it, hi_it] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  const int lo = *lo_it;
  const int range = *hi_it - lo;
  ImageTensor t;
  t.side = img.width;
  t.values.resize(img.pixels.size(), 0.0f);
  if (range == 0) return t;
  const double inv = 1.0 / range;
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    t.values[i] = static_cast<float>((img.pixels[i] - lo) * inv);
  return t;
}

// Full inference-time pipeline: crop, letterbox.
inline GrayImage prepare_plan(const GrayImage& raw, int side,
                              std::uint8_t bg_threshold = kDefaultBackgroundThreshold) {
  return letterbox_resize(crop_to_content(raw, bg_threshold), side);
}

}  // namespace hfl
