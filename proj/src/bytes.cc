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

#include "bctx/bytes.h"

#include <bit>
#include <cstring>
#include <fstream>

namespace bctx {

void ByteReader::Need(std::size_t n) const {
  if (n > data_.size() - pos_) {
    throw Error(overrun_, "read of " + std::to_string(n) + " bytes at offset " +
                              std::to_string(pos_) + " exceeds buffer of " +
                              std::to_string(data_.size()));
  }
}

void ByteReader::Seek(std::size_t pos) {
  if (pos > data_.size()) {
    throw Error(overrun_, "seek to " + std::to_string(pos) + " beyond " +
                              std::to_string(data_.size()));
  }
  pos_ = pos;
}

std::uint8_t ByteReader::U8() {
  Need(1);
  return data_[pos_++];
}

std::uint16_t ByteReader::U16() {
  Need(2);
  auto v = LoadU16(data_, pos_);
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::U32() {
  Need(4);
  auto v = LoadU32(data_, pos_);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::U64() {
  std::uint64_t lo = U32();
  std::uint64_t hi = U32();
  return lo | (hi << 32);
}

std::uint32_t ByteReader::Uleb128() {
  std::uint32_t result = 0;
  for (int i = 0; i < 5; ++i) {
    std::uint8_t b = U8();
    result |= static_cast<std::uint32_t>(b & 0x7f) << (7 * i);
    if ((b & 0x80) == 0) return result;
  }
  throw Error(overrun_, "uleb128 longer than 5 bytes at offset " + std::to_string(pos_));
}

ByteView ByteReader::Take(std::size_t n) {
  Need(n);
  auto v = data_.subspan(pos_, n);
  pos_ += n;
  return v;
}

double ReadF64(ByteReader& r) { return std::bit_cast<double>(r.U64()); }

void ByteWriter::U16(std::uint16_t v) {
  buf_.push_back(static_cast<std::uint8_t>(v));
  buf_.push_back(static_cast<std::uint8_t>(v >> 8));
}

void ByteWriter::U32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::U64(std::uint64_t v) {
  U32(static_cast<std::uint32_t>(v));
  U32(static_cast<std::uint32_t>(v >> 32));
}

void ByteWriter::F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::Uleb128(std::uint32_t v) {
  do {
    std::uint8_t b = v & 0x7f;
    v >>= 7;
    if (v != 0) b |= 0x80;
    buf_.push_back(b);
  } while (v != 0);
}

void ByteWriter::AlignTo(std::size_t alignment) {
  while (buf_.size() % alignment != 0) buf_.push_back(0);
}

void ByteWriter::PatchU16(std::size_t off, std::uint16_t v) {
  buf_.at(off) = static_cast<std::uint8_t>(v);
  buf_.at(off + 1) = static_cast<std::uint8_t>(v >> 8);
}

void ByteWriter::PatchU32(std::size_t off, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.at(off + i) = static_cast<std::uint8_t>(v >> (8 * i));
}

Bytes ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path.string());
  return data;
}

void WriteFile(const std::filesystem::path& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

}  // namespace bctx
