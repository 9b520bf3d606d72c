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

#include <filesystem>
#include <string>
#include <vector>

#include "bctx/bytes.h"

namespace bctx {

struct ApkEntry {
  std::string name;
  Bytes bytes;
  // Set when the stored CRC-32 does not match the decompressed payload. The
  // entry is still returned.
  bool crc_mismatch = false;
};

// The subset of an APK the pipeline consumes. Immutable after OpenApk.
struct ApkBundle {
  std::filesystem::path source_path;
  // "classes.dex" first, then "classesN.dex" by ascending N.
  std::vector<ApkEntry> dex_entries;
  Bytes manifest_bytes;
  // res/values*/strings.xml and resources.arsc, in archive order.
  std::vector<ApkEntry> resource_entries;
  std::vector<std::string> warnings;
};

ApkBundle OpenApk(const std::filesystem::path& path);
ApkBundle OpenApkBytes(ByteView archive, std::filesystem::path source_path = {});

// Concatenation of all dex entries in multi-dex order.
Bytes ConcatDexBytes(const ApkBundle& bundle);

// Multi-dex rank of an entry name: 1 for classes.dex, N for classesN.dex, 0 if
// the name is not a top-level dex entry.
unsigned DexOrdinal(std::string_view entry_name);

// Generic ZIP reading, exposed for tools and tests.
struct ZipEntryInfo {
  std::string name;
  std::uint16_t method = 0;
  std::uint32_t crc32 = 0;
  std::uint32_t compressed_size = 0;
  std::uint32_t uncompressed_size = 0;
  std::uint32_t local_header_offset = 0;
};

std::vector<ZipEntryInfo> ListZipEntries(ByteView archive);
// Decompresses one entry; sets *crc_ok when non-null.
Bytes ExtractZipEntry(ByteView archive, const ZipEntryInfo& info, bool* crc_ok = nullptr);

// Minimal PKZIP writer (stored and DEFLATE entries, no Zip64).
class ZipWriter {
 public:
  enum class Method : std::uint16_t { kStored = 0, kDeflate = 8 };

  void Add(std::string name, ByteView data, Method method = Method::kDeflate);
  Bytes Finish() const;

 private:
  struct Pending {
    std::string name;
    Method method;
    std::uint32_t crc;
    std::uint32_t raw_size;
    Bytes payload;
  };
  std::vector<Pending> entries_;
};

}  // namespace bctx
