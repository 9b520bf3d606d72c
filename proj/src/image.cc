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

#include "bctx/image.h"

#include <zlib.h>

#include <cmath>

#include "bctx/digest.h"

namespace bctx {

PixelGrid BytesToPixels(ByteView bytes) {
  const std::size_t pixels = (bytes.size() + 2) / 3;
  std::size_t side = static_cast<std::size_t>(std::sqrt(static_cast<double>(pixels)));
  while (side * side < pixels) ++side;
  while (side > 0 && (side - 1) * (side - 1) >= pixels) --side;

  PixelGrid grid;
  grid.side = side;
  grid.rgb.assign(side * side * 3, 0);
  std::copy(bytes.begin(), bytes.end(), grid.rgb.begin());
  return grid;
}

std::vector<std::uint8_t> BoxDownsample(std::span<const std::uint8_t> src, std::size_t src_side,
                                        std::size_t dst_side, std::size_t channels) {
  if (dst_side > src_side || src.size() != src_side * src_side * channels) {
    throw Error(ErrorCode::kShapeMismatch, "box downsample from " + std::to_string(src_side) +
                                               " to " + std::to_string(dst_side));
  }
  std::vector<std::uint8_t> out(dst_side * dst_side * channels);
  std::vector<std::uint64_t> sums(channels);
  // Source index i lies in [a*src/dst, (a+1)*src/dst) iff
  // ceil(a*src/dst) <= i < ceil((a+1)*src/dst).
  auto lo = [&](std::size_t a) { return (a * src_side + dst_side - 1) / dst_side; };
  for (std::size_t y = 0; y < dst_side; ++y) {
    const std::size_t y0 = lo(y), y1 = lo(y + 1);
    for (std::size_t x = 0; x < dst_side; ++x) {
      const std::size_t x0 = lo(x), x1 = lo(x + 1);
      std::fill(sums.begin(), sums.end(), 0);
      for (std::size_t sy = y0; sy < y1; ++sy) {
        const std::uint8_t* row = src.data() + (sy * src_side + x0) * channels;
        for (std::size_t sx = x0; sx < x1; ++sx, row += channels) {
          for (std::size_t c = 0; c < channels; ++c) sums[c] += row[c];
        }
      }
      const std::uint64_t count = (y1 - y0) * (x1 - x0);
      std::uint8_t* dst = out.data() + (y * dst_side + x) * channels;
      for (std::size_t c = 0; c < channels; ++c) {
        dst[c] = static_cast<std::uint8_t>((2 * sums[c] + count) / (2 * count));
      }
    }
  }
  return out;
}

BytecodeImage NormalizeTo300(const PixelGrid& grid) {
  if (grid.rgb.size() != grid.side * grid.side * kImageChannels) {
    throw Error(ErrorCode::kShapeMismatch, "pixel grid length does not match side");
  }
  BytecodeImage image;
  if (grid.side <= kImageSide) {
    for (std::size_t y = 0; y < grid.side; ++y) {
      std::copy_n(grid.rgb.begin() + static_cast<std::ptrdiff_t>(y * grid.side * 3), grid.side * 3,
                  image.data.begin() + static_cast<std::ptrdiff_t>(y * kImageSide * 3));
    }
  } else {
    image.data = BoxDownsample(grid.rgb, grid.side, kImageSide, kImageChannels);
  }
  return image;
}

Bytes EncodePng(std::span<const std::uint8_t> rgb, std::size_t width, std::size_t height) {
  if (rgb.size() != width * height * 3) {
    throw Error(ErrorCode::kShapeMismatch, "raster size does not match PNG dimensions");
  }
  // Filter type 0 (None) on every scanline.
  Bytes raw;
  raw.reserve(height * (width * 3 + 1));
  for (std::size_t y = 0; y < height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), rgb.begin() + static_cast<std::ptrdiff_t>(y * width * 3),
               rgb.begin() + static_cast<std::ptrdiff_t>((y + 1) * width * 3));
  }
  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  Bytes compressed(compressed_size);
  if (compress2(compressed.data(), &compressed_size, raw.data(), static_cast<uLong>(raw.size()),
                Z_BEST_COMPRESSION) != Z_OK) {
    throw Error(ErrorCode::kIoError, "zlib compression failed");
  }
  compressed.resize(compressed_size);

  ByteWriter w;
  w.Append(ByteView(reinterpret_cast<const std::uint8_t*>("\x89PNG\r\n\x1a\n"), 8));
  auto chunk = [&w](const char* type, ByteView payload) {
    // PNG integers are big-endian.
    const auto len = static_cast<std::uint32_t>(payload.size());
    for (int s = 24; s >= 0; s -= 8) w.U8(static_cast<std::uint8_t>(len >> s));
    Bytes body(type, type + 4);
    body.insert(body.end(), payload.begin(), payload.end());
    w.Append(body);
    const std::uint32_t crc = Crc32(body);
    for (int s = 24; s >= 0; s -= 8) w.U8(static_cast<std::uint8_t>(crc >> s));
  };
  Bytes ihdr;
  for (std::uint32_t v : {static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height)}) {
    for (int s = 24; s >= 0; s -= 8) ihdr.push_back(static_cast<std::uint8_t>(v >> s));
  }
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // depth 8, truecolor, deflate, filter 0, no interlace
  chunk("IHDR", ihdr);
  chunk("IDAT", compressed);
  chunk("IEND", {});
  return w.Release();
}

void RenderPng(const BytecodeImage& image, const std::filesystem::path& path) {
  WriteFile(path, EncodePng(image.data, kImageSide, kImageSide));
}

}  // namespace bctx
