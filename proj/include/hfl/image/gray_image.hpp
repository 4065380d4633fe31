#pragma once

#include <cstdint>
#include <vector>

#include "hfl/core/error.hpp"

namespace hfl {

// Row-major 8-bit grayscale raster.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
    require(w >= 1 && h >= 1, ErrorKind::InvalidArgument, "image dimensions must be positive");
    pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
  }

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

  bool operator==(const GrayImage&) const = default;
};

// Square network input with values in [0, 1].
struct ImageTensor {
  int side = 0;
  std::vector<float> values;

  bool operator==(const ImageTensor&) const = default;
};

inline void validate(const GrayImage& img) {
  require(img.width >= 1 && img.height >= 1 &&
              img.pixels.size() == static_cast<std::size_t>(img.width) * img.height,
          ErrorKind::InvalidArgument, "malformed GrayImage");
}

}  // namespace hfl
