#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "hfl/core/random.hpp"
#include "hfl/image/augment.hpp"
#include "hfl/image/pgm.hpp"
#include "hfl/image/preprocess.hpp"

namespace {

hfl::GrayImage random_image(int w, int h, std::uint64_t seed) {
  hfl::Rng rng(seed);
  hfl::GrayImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.below(256));
  return img;
}

std::vector<unsigned char> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

TEST(Pgm, EncodeDecodeRoundTrip) {
  const auto img = random_image(7, 5, 1);
  EXPECT_EQ(hfl::decode_pgm(hfl::encode_pgm(img)), img);
}

TEST(Pgm, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "hfl_round.pgm").string();
  const auto img = random_image(16, 9, 2);
  hfl::write_pgm(path, img);
  EXPECT_EQ(hfl::read_pgm(path), img);
  std::filesystem::remove(path);
}

TEST(Pgm, HeaderCommentsAreSkipped) {
  auto b = bytes_of("P5\n# made by hand\n2 1\n255\n");
  b.push_back(10);
  b.push_back(20);
  const auto img = hfl::decode_pgm(b);
  EXPECT_EQ(img.width, 2);
  EXPECT_EQ(img.at(1, 0), 20);
}

TEST(Pgm, AsciiVariantIsRejected) {
  try {
    hfl::decode_pgm(bytes_of("P2\n2 2\n255\n0 0 0 0\n"));
    FAIL();
  } catch (const hfl::PgmFormatError& e) {
    EXPECT_EQ(e.kind(), hfl::ErrorKind::PgmFormatError);
    EXPECT_EQ(e.offset(), 1u);
  }
}

TEST(Pgm, TruncationReportsOffset) {
  auto b = bytes_of("P5\n4 4\n255\n");
  const std::size_t header = b.size();
  for (int i = 0; i < 10; ++i) b.push_back(0);
  try {
    hfl::decode_pgm(b);
    FAIL();
  } catch (const hfl::PgmFormatError& e) {
    EXPECT_EQ(e.offset(), header + 10);
  }
}

TEST(Pgm, SmallMaxvalIsRescaled) {
  auto b = bytes_of("P5\n3 1\n15\n");
  for (unsigned char v : {0, 15, 7}) b.push_back(v);
  const auto img = hfl::decode_pgm(b);
  EXPECT_EQ(img.at(0, 0), 0);
  EXPECT_EQ(img.at(1, 0), 255);
  EXPECT_EQ(img.at(2, 0), 119);
}

TEST(Crop, TightBoxAroundContent) {
  hfl::GrayImage img(20, 20, 255);
  for (int y = 2; y < 18; ++y)
    for (int x = 2; x < 18; ++x) img.at(x, y) = 40;
  const auto c = hfl::crop_to_content(img);
  EXPECT_EQ(c.width, 16);
  EXPECT_EQ(c.height, 16);
  for (auto p : c.pixels) EXPECT_EQ(p, 40);
}

TEST(Crop, AllWhiteIsDegenerate) {
  try {
    hfl::crop_to_content(hfl::GrayImage(8, 8, 255));
    FAIL();
  } catch (const hfl::Error& e) {
    EXPECT_EQ(e.kind(), hfl::ErrorKind::DegenerateImage);
  }
}

TEST(Crop, ThresholdControlsBackground) {
  hfl::GrayImage img(5, 5, 252);
  img.at(3, 1) = 100;
  EXPECT_EQ(hfl::crop_to_content(img).width, 1);
  EXPECT_EQ(hfl::crop_to_content(img, 253).width, 5);
}

TEST(Letterbox, WideImageIsCenteredVertically) {
  const auto out = hfl::letterbox_resize(hfl::GrayImage(100, 50, 200), 64);
  ASSERT_EQ(out.width, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) ASSERT_EQ(out.at(x, y), (y >= 16 && y <= 47) ? 200 : 0) << x << "," << y;
}

TEST(Letterbox, TallImageIsCenteredHorizontally) {
  const auto out = hfl::letterbox_resize(hfl::GrayImage(50, 100, 200), 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) ASSERT_EQ(out.at(x, y), (x >= 16 && x <= 47) ? 200 : 0) << x << "," << y;
}

TEST(Letterbox, SameSizeIsIdentity) {
  const auto img = random_image(32, 32, 3);
  EXPECT_EQ(hfl::letterbox_resize(img, 32), img);
}

TEST(Letterbox, DownsamplingAveragesBlocks) {
  hfl::GrayImage img(4, 4, 0);
  img.at(0, 0) = img.at(1, 0) = img.at(0, 1) = img.at(1, 1) = 200;
  const auto out = hfl::letterbox_resize(img, 2);
  EXPECT_EQ(out.at(0, 0), 200);
  EXPECT_EQ(out.at(1, 0), 0);
  EXPECT_EQ(out.at(1, 1), 0);
}

TEST(MinMax, ThreeLevels) {
  hfl::GrayImage img(2, 2, 0);
  img.pixels = {0, 128, 255, 0};
  const auto t = hfl::minmax_normalize(img);
  EXPECT_FLOAT_EQ(t.values[0], 0.0f);
  EXPECT_NEAR(t.values[1], 0.50196, 1e-5);
  EXPECT_FLOAT_EQ(t.values[2], 1.0f);
}

TEST(MinMax, ConstantImageMapsToZeros) {
  const auto t = hfl::minmax_normalize(hfl::GrayImage(4, 4, 77));
  for (float v : t.values) EXPECT_EQ(v, 0.0f);
}

TEST(Rotate, QuarterTurnIsTransposeThenMirror) {
  hfl::GrayImage img(3, 3);
  img.pixels = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto r = hfl::rotate(img, std::numbers::pi / 2);
  hfl::GrayImage expected(3, 3);
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x) expected.at(x, y) = img.at(y, x);
  EXPECT_EQ(r, hfl::mirror_horizontal(expected));
  EXPECT_EQ(r.pixels, (std::vector<std::uint8_t>{7, 4, 1, 8, 5, 2, 9, 6, 3}));
}

TEST(Rotate, ZeroAngleAndFullTurnAreIdentity) {
  const auto img = random_image(9, 9, 4);
  EXPECT_EQ(hfl::rotate(img, 0.0), img);
  EXPECT_EQ(hfl::rotate(img, 2 * std::numbers::pi), img);
  EXPECT_EQ(hfl::rotate_quarter_turns(hfl::rotate_quarter_turns(img, 1), 3), img);
}

TEST(Rotate, RectangularHalfTurnKeepsShape) {
  const auto img = random_image(6, 3, 5);
  const auto r = hfl::rotate(img, std::numbers::pi);
  EXPECT_EQ(r.width, 6);
  EXPECT_EQ(r.at(0, 0), img.at(5, 2));
}

TEST(Rotate, SmallAngleKeepsCenterPixel) {
  hfl::GrayImage img(9, 9, 0);
  img.at(4, 4) = 255;
  const auto r = hfl::rotate(img, 0.1);
  EXPECT_GT(r.at(4, 4), 200);
}

TEST(Mirror, IsAnInvolution) {
  const auto img = random_image(7, 4, 6);
  EXPECT_EQ(hfl::mirror_horizontal(hfl::mirror_horizontal(img)), img);
  EXPECT_EQ(hfl::mirror_horizontal(img).at(0, 1), img.at(6, 1));
}

TEST(Augment, ZeroParametersAreIdentity) {
  hfl::Rng rng(7);
  const auto img = random_image(8, 8, 7);
  EXPECT_EQ(hfl::augment(img, rng, {0.0, 0.0}), img);
  EXPECT_EQ(hfl::augment(img, rng, {1.0, 0.0}), hfl::mirror_horizontal(img));
  EXPECT_THROW(hfl::augment(img, rng, {1.5, 0.0}), hfl::Error);
}

}  // namespace
