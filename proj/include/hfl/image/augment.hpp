#pragma once

#include <cmath>
#include <numbers>

#include "hfl/core/random.hpp"
#include "hfl/image/gray_image.hpp"
#include "hfl/image/preprocess.hpp"

namespace hfl {

struct AugmentParams {
  double p_mirror = 0.5;
  double max_angle = std::numbers::pi;
};

inline GrayImage mirror_horizontal(const GrayImage& img) {
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(img.width - 1 - x, y) = img.at(x, y);
  return out;
}

// Clockwise quarter turns (screen coordinates, y down).
inline GrayImage rotate_quarter_turns(const GrayImage& img, int turns) {
  turns = ((turns % 4) + 4) % 4;
  if (turns == 0) return img;
  const bool swap = turns % 2 == 1;
  GrayImage out(swap ? img.height : img.width, swap ? img.width : img.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      int sx = 0, sy = 0;
      switch (turns) {
        case 1: sx = y; sy = img.height - 1 - x; break;
        case 2: sx = img.width - 1 - x; sy = img.height - 1 - y; break;
        case 3: sx = img.width - 1 - y; sy = x; break;
      }
      out.at(x, y) = img.at(sx, sy);
    }
  }
  return out;
}

// Rotation about the image center by `angle` radians (clockwise on screen) with
// bilinear sampling; samples outside the source read as black. Exact multiples
// of pi/2 take the lossless permutation path.
inline GrayImage rotate(const GrayImage& img, double angle) {
  validate(img);
  const double quarter = std::numbers::pi / 2.0;
  const double turns = std::round(angle / quarter);
  if (std::abs(angle - turns * quarter) <= 1e-12 && (img.width == img.height || std::fmod(turns, 2.0) == 0.0))
    return rotate_quarter_turns(img, static_cast<int>(std::fmod(turns, 4.0)));

  const double c = std::cos(angle), s = std::sin(angle);
  const double cx = (img.width - 1) / 2.0, cy = (img.height - 1) / 2.0;
  auto sample = [&](int x, int y) -> double {
    return img.contains(x, y) ? img.at(x, y) : 0.0;
  };
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double sx = c * dx + s * dy + cx;
      const double sy = -s * dx + c * dy + cy;
      const double fx = std::floor(sx), fy = std::floor(sy);
      const double ax = sx - fx, ay = sy - fy;
      const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
      const double v = (1 - ax) * (1 - ay) * sample(ix, iy) + ax * (1 - ay) * sample(ix + 1, iy) +
                       (1 - ax) * ay * sample(ix, iy + 1) + ax * ay * sample(ix + 1, iy + 1);
      out.at(x, y) = detail::to_byte(v);
    }
  }
  return out;
}

inline GrayImage apply_augmentation(const GrayImage& img, bool mirror, double angle) {
  GrayImage out = mirror ? mirror_horizontal(img) : img;
  return angle == 0.0 ? out : rotate(out, angle);
}

// Online augmentation draw: mirror with probability p_mirror, then rotate by an
// angle uniform in [-max_angle, max_angle].
inline GrayImage augment(const GrayImage& img, Rng& rng, const AugmentParams& params) {
  require(params.p_mirror >= 0.0 && params.p_mirror <= 1.0, ErrorKind::InvalidArgument,
          "p_mirror must be in [0, 1]");
  require(params.max_angle >= 0.0, ErrorKind::InvalidArgument, "max_angle must be >= 0");
  const bool mirror = rng.uniform() < params.p_mirror;
  const double angle = params.max_angle > 0.0 ? rng.uniform(-params.max_angle, params.max_angle) : 0.0;
  return apply_augmentation(img, mirror, angle);
}

}  // namespace hfl
