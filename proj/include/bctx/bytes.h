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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bctx/error.h"

namespace bctx {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Bounds-checked little-endian cursor over a byte buffer. Reads past the end
// throw Error with the code supplied at construction.
class ByteReader {
 public:
  explicit ByteReader(ByteView data, ErrorCode overrun = ErrorCode::kTruncatedSection)
      : data_(data), overrun_(overrun) {}

  std::size_t pos() const { return pos_; }
  std::size_t size() const { return data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  void Seek(std::size_t pos);
  void Skip(std::size_t n) { Seek(pos_ + n); }

  std::uint8_t U8();
  std::uint16_t U16();
  std::uint32_t U32();
  std::uint64_t U64();
  std::uint32_t Uleb128();
  ByteView Take(std::size_t n);

 private:
  void Need(std::size_t n) const;

  ByteView data_;
  std::size_t pos_ = 0;
  ErrorCode overrun_;
};

inline std::uint16_t LoadU16(ByteView d, std::size_t off) {
  return static_cast<std::uint16_t>(d[off] | (d[off + 1] << 8));
}
inline std::uint32_t LoadU32(ByteView d, std::size_t off) {
  return static_cast<std::uint32_t>(d[off]) | (static_cast<std::uint32_t>(d[off + 1]) << 8) |
         (static_cast<std::uint32_t>(d[off + 2]) << 16) |
         (static_cast<std::uint32_t>(d[off + 3]) << 24);
}

// Append-only little-endian writer with in-place patching of earlier fields.
class ByteWriter {
 public:
  std::size_t size() const { return buf_.size(); }
  const Bytes& bytes() const { return buf_; }
  Bytes Release() { return std::move(buf_); }

  void U8(std::uint8_t v) { buf_.push_back(v); }
  void U16(std::uint16_t v);
  void U32(std::uint32_t v);
  void U64(std::uint64_t v);
  void F64(double v);
  void Uleb128(std::uint32_t v);
  void Append(ByteView data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  void Append(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
  void Zeros(std::size_t n) { buf_.insert(buf_.end(), n, 0); }
  void AlignTo(std::size_t alignment);

  void PatchU16(std::size_t off, std::uint16_t v);
  void PatchU32(std::size_t off, std::uint32_t v);
  std::uint8_t* data() { return buf_.data(); }

 private:
  Bytes buf_;
};

double ReadF64(ByteReader& r);

Bytes ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, ByteView data);
inline void WriteFile(const std::filesystem::path& path, std::string_view text) {
  WriteFile(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline ByteView AsBytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace bctx
