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

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bctx/bytes.h"

namespace bctx {

inline constexpr std::size_t kImageSide = 300;
inline constexpr std::size_t kImageChannels = 3;

// Square RGB raster, row-major with interleaved channels.
struct PixelGrid {
  std::size_t side = 0;
  std::vector<std::uint8_t> rgb;  // side * side * 3 values

  std::size_t pixel_count() const { return side * side; }
};

// Fixed 300x300x3 input raster. Always holds exactly 270000 values.
struct BytecodeImage {
  std::vector<std::uint8_t> data = std::vector<std::uint8_t>(kImageSide * kImageSide * kImageChannels);

  std::uint8_t at(std::size_t x, std::size_t y, std::size_t c) const {
    return data[(y * kImageSide + x) * kImageChannels + c];
  }
  friend bool operator==(const BytecodeImage&, const BytecodeImage&) = default;
};

// Three consecutive bytes become one pixel; the last pixel is zero-completed
// and the grid padded with black up to the smallest enclosing square.
PixelGrid BytesToPixels(ByteView bytes);

// Pads grids up to 300 at the top-left; box-filters larger ones down.
BytecodeImage NormalizeTo300(const PixelGrid& grid);

inline BytecodeImage BytesToImage(ByteView bytes) { return NormalizeTo300(BytesToPixels(bytes)); }

// Area-average downsample of a square interleaved raster. Output pixel (x, y)
// is the round-half-up mean of the source box
// [x*src/dst, (x+1)*src/dst) x [y*src/dst, (y+1)*src/dst). Requires dst <= src.
std::vector<std::uint8_t> BoxDownsample(std::span<const std::uint8_t> src, std::size_t src_side,
                                        std::size_t dst_side, std::size_t channels);

// Encodes an 8-bit truecolor PNG (single IDAT).
Bytes EncodePng(std::span<const std::uint8_t> rgb, std::size_t width, std::size_t height);
void RenderPng(const BytecodeImage& image, const std::filesystem::path& path);

}  // namespace bctx
