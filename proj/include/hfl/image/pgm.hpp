#pragma once

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"
#include "hfl/image/gray_image.hpp"

namespace hfl {

// Binary PGM (P5, maxval <= 255). Comments are accepted in the header.
inline GrayImage decode_pgm(const std::vector<unsigned char>& bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_uint = [&](const char* what) {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos]))
      throw PgmFormatError(std::string("expected ") + what, pos);
    long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000) throw PgmFormatError(std::string(what) + " too large", pos);
      ++pos;
    }
    return static_cast<int>(value);
  };

  if (bytes.size() < 2 || bytes[0] != 'P') throw PgmFormatError("missing magic number", 0);
  if (bytes[1] != '5')
    throw PgmFormatError(std::string("unsupported format P") + static_cast<char>(bytes[1]), 1);
  pos = 2;
  const int width = read_uint("width");
  const int height = read_uint("height");
  const std::size_t maxval_at = pos;
  const int maxval = read_uint("maxval");
  if (width < 1 || height < 1) throw PgmFormatError("zero image dimension", maxval_at);
  if (maxval < 1 || maxval > 255) throw PgmFormatError("maxval must be in 1..255", maxval_at);
  if (pos >= bytes.size() || !std::isspace(bytes[pos]))
    throw PgmFormatError("expected whitespace after maxval", pos);
  ++pos;

  const std::size_t header = pos;
  const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t have = bytes.size() - header;
  if (have < need) throw PgmFormatError("truncated payload", header + have);

  GrayImage img(width, height);
  for (std::size_t i = 0; i < need; ++i) {
    const unsigned v = bytes[header + i];
    if (static_cast<int>(v) > maxval) throw PgmFormatError("sample exceeds maxval", header + i);
    img.pixels[i] = static_cast<std::uint8_t>(maxval == 255 ? v : (v * 255 + maxval / 2) / maxval);
  }
  return img;
}

inline std::vector<unsigned char> encode_pgm(const GrayImage& img) {
  validate(img);
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

inline GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_pgm(bytes);
}

inline void write_pgm(const std::string& path, const GrayImage& img) {
  const auto bytes = encode_pgm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::IoError, "short write to " + path);
}

}  // namespace hfl
