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

#include <array>
#include <cstdint>
#include <string>

#include "bctx/bytes.h"

namespace bctx {

// Adler-32 as used by the DEX header checksum.
std::uint32_t Adler32(ByteView data);
std::array<std::uint8_t, 20> Sha1(ByteView data);
std::string Sha256Hex(ByteView data);
inline std::string Sha256Hex(std::string_view text) { return Sha256Hex(AsBytes(text)); }
std::uint32_t Crc32(ByteView data);

}  // namespace bctx
