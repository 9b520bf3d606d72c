// Copyright 2026 The bctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "bctx/image.h"
#include "bctx/rng.h"
#include "oracles.h"

namespace bctx {
namespace {

TEST(Pixels, GroupsTripletsAndPadsSquare) {
  const Bytes data = {'d', 'e', 'x', '\n', '0', '3', '5'};
  const PixelGrid grid = BytesToPixels(data);
  EXPECT_EQ(grid.side, 2u);
  ASSERT_EQ(grid.rgb.size(), 12u);
  EXPECT_EQ(grid.rgb[0], 100);
  EXPECT_EQ(grid.rgb[1], 101);
  EXPECT_EQ(grid.rgb[2], 120);
  EXPECT_EQ(grid.rgb[3], 10);
  EXPECT_EQ(grid.rgb[4], 48);
  EXPECT_EQ(grid.rgb[5], 51);
  EXPECT_EQ(grid.rgb[6], '5');
  EXPECT_EQ(grid.rgb[7], 0);
  for (std::size_t i = 8; i < 12; ++i) EXPECT_EQ(grid.rgb[i], 0);
}

TEST(Pixels, SideIsCeilSqrtOfPixelCount) {
  for (std::size_t n : {0u, 1u, 3u, 4u, 27u, 28u, 300u, 30000u}) {
    const Bytes data(n, 1);
    const std::size_t pixels = (n + 2) / 3;
    const std::size_t side = BytesToPixels(data).side;
    EXPECT_GE(side * side, pixels);
    if (side > 0) EXPECT_LT((side - 1) * (side - 1), pixels);
  }
}

TEST(Image, SmallInputPadsAtTopLeft) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    Bytes data(rng.Below(270000) + 1);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng.Below(256));
    const BytecodeImage image = BytesToImage(data);
    ASSERT_EQ(image.data.size(), 270000u);
    const std::size_t side = BytesToPixels(data).side;
    ASSERT_LE(side, 300u);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t pixel = i / 3, x = pixel % side, y = pixel / side;
      ASSERT_EQ(image.at(x, y, i % 3), data[i]);
    }
    for (std::size_t y = 0; y < 300; y += 7) {
      for (std::size_t x = side; x < 300; x += 5) ASSERT_EQ(image.at(x, y, 0), 0);
    }
  }
}

TEST(Image, DownsampleMatchesReference) {
  Rng rng(12);
  for (auto [src, dst] : std::vector<std::pair<std::size_t, std::size_t>>{{7, 3}, {10, 5}, {13, 4}, {301, 300}, {450, 300}}) {
    std::vector<std::uint8_t> pixels(src * src * 3);
    for (auto& p : pixels) p = static_cast<std::uint8_t>(rng.Below(256));
    EXPECT_EQ(BoxDownsample(pixels, src, dst, 3), oracle::BoxDownsample(pixels, src, dst, 3)) << src << "->" << dst;
  }
}

TEST(Image, LargeInputIsDownsampled) {
  Bytes data(400 * 400 * 3);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<std::uint8_t>((i * 7) % 251);
  const PixelGrid grid = BytesToPixels(data);
  ASSERT_EQ(grid.side, 400u);
  EXPECT_EQ(NormalizeTo300(grid).data, oracle::BoxDownsample(grid.rgb, 400, 300, 3));
}

TEST(Image, CheckerboardAveragesToMidGray) {
  PixelGrid grid;
  grid.side = 600;
  grid.rgb.resize(600 * 600 * 3);
  for (std::size_t y = 0; y < 600; ++y) {
    for (std::size_t x = 0; x < 600; ++x) {
      for (std::size_t c = 0; c < 3; ++c) grid.rgb[(y * 600 + x) * 3 + c] = (x + y) % 2 == 0 ? 0 : 255;
    }
  }
  for (auto v : NormalizeTo300(grid).data) ASSERT_EQ(v, 128);
}

TEST(Image, ConstantInputStaysConstant) {
  const Bytes data(500 * 500 * 3, 77);
  for (auto v : BytesToImage(data).data) ASSERT_EQ(v, 77);
}

TEST(Png, DecodesWithLibpng) {
  Rng rng(3);
  std::vector<std::uint8_t> rgb(17 * 9 * 3);
  for (auto& v : rgb) v = static_cast<std::uint8_t>(rng.Below(256));
  const auto decoded = oracle::DecodePng(EncodePng(rgb, 17, 9));
  EXPECT_EQ(decoded.width, 17u);
  EXPECT_EQ(decoded.height, 9u);
  EXPECT_EQ(decoded.rgb, rgb);
}

TEST(Png, RenderWritesFullImage) {
  BytecodeImage image;
  for (std::size_t i = 0; i < image.data.size(); ++i) image.data[i] = static_cast<std::uint8_t>(i % 256);
  const auto path = std::filesystem::temp_directory_path() / "bctx_image_test.png";
  RenderPng(image, path);
  const auto decoded = oracle::DecodePng(ReadFile(path));
  EXPECT_EQ(decoded.width, 300u);
  EXPECT_EQ(decoded.rgb, image.data);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace bctx
