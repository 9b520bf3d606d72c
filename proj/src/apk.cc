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

#include "bctx/apk.h"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <map>

#include "bctx/digest.h"

namespace bctx {
namespace {

constexpr std::uint32_t kLocalHeaderSig = 0x04034b50;
constexpr std::uint32_t kCentralHeaderSig = 0x02014b50;
constexpr std::uint32_t kEndOfCentralDirSig = 0x06054b50;
constexpr std::size_t kEocdSize = 22;
constexpr std::size_t kMaxCommentSize = 0xffff;
constexpr std::size_t kMinDexSize = 112;

Bytes Inflate(ByteView compressed, std::size_t expected_size, const std::string& name) {
  // One spare byte so inflate always has room to report trailing garbage.
  Bytes out(expected_size + 1);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    throw Error(ErrorCode::kCorruptEntry, "inflateInit failed for " + name);
  }
  zs.next_in = const_cast<Bytef*>(compressed.data());
  zs.avail_in = static_cast<uInt>(compressed.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected_size) {
    throw Error(ErrorCode::kCorruptEntry, "DEFLATE stream invalid for " + name);
  }
  out.resize(expected_size);
  return out;
}

bool IsStringsResource(std::string_view name) {
  // res/values/strings.xml and qualified variants such as res/values-fr/strings.xml.
  if (!name.starts_with("res/values") || !name.ends_with("/strings.xml")) return false;
  return name.find('/', 4) == name.rfind('/');
}

}  // namespace

unsigned DexOrdinal(std::string_view name) {
  if (!name.starts_with("classes") || !name.ends_with(".dex")) return 0;
  std::string_view digits = name.substr(7, name.size() - 7 - 4);
  if (digits.empty()) return 1;
  if (digits.front() == '0') return 0;
  unsigned n = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || n < 2) return 0;
  return n;
}

std::vector<ZipEntryInfo> ListZipEntries(ByteView archive) {
  if (archive.size() > 0xffffffffull) {
    throw Error(ErrorCode::kNotSupported, "archives larger than 4 GiB require Zip64");
  }
  if (archive.size() < kEocdSize) throw Error(ErrorCode::kNotAZip, "file too small");

  // Scan backwards for the end-of-central-directory record; it may be
  // followed by a comment of up to 64 KiB.
  std::size_t eocd = SIZE_MAX;
  const std::size_t lowest =
      archive.size() > kEocdSize + kMaxCommentSize ? archive.size() - kEocdSize - kMaxCommentSize : 0;
  for (std::size_t pos = archive.size() - kEocdSize + 1; pos-- > lowest;) {
    if (LoadU32(archive, pos) == kEndOfCentralDirSig) {
      eocd = pos;
      break;
    }
  }
  if (eocd == SIZE_MAX) throw Error(ErrorCode::kNotAZip, "no end-of-central-directory record");

  ByteReader eocd_reader(archive.subspan(eocd), ErrorCode::kNotAZip);
  eocd_reader.Skip(10);
  const std::uint16_t total_entries = eocd_reader.U16();
  const std::uint32_t cd_size = eocd_reader.U32();
  const std::uint32_t cd_offset = eocd_reader.U32();
  if (total_entries == 0xffff || cd_offset == 0xffffffff || cd_size == 0xffffffff) {
    throw Error(ErrorCode::kNotSupported, "Zip64 archives are not supported");
  }
  if (static_cast<std::uint64_t>(cd_offset) + cd_size > eocd) {
    throw Error(ErrorCode::kNotAZip, "central directory outside archive");
  }

  std::vector<ZipEntryInfo> entries;
  ByteReader r(archive.subspan(cd_offset, cd_size), ErrorCode::kNotAZip);
  for (unsigned i = 0; i < total_entries; ++i) {
    if (r.U32() != kCentralHeaderSig) {
      throw Error(ErrorCode::kNotAZip, "bad central directory signature at entry " + std::to_string(i));
    }
    ZipEntryInfo info;
    r.Skip(4);  // version made by, version needed
    r.U16();    // flags
    info.method = r.U16();
    r.Skip(4);  // time, date
    info.crc32 = r.U32();
    info.compressed_size = r.U32();
    info.uncompressed_size = r.U32();
    const std::uint16_t name_len = r.U16();
    const std::uint16_t extra_len = r.U16();
    const std::uint16_t comment_len = r.U16();
    r.Skip(8);  // disk start, internal attrs, external attrs
    info.local_header_offset = r.U32();
    auto name = r.Take(name_len);
    info.name.assign(name.begin(), name.end());
    r.Skip(extra_len + comment_len);
    if (info.compressed_size == 0xffffffff || info.uncompressed_size == 0xffffffff ||
        info.local_header_offset == 0xffffffff) {
      throw Error(ErrorCode::kNotSupported, "Zip64 entry " + info.name);
    }
    entries.push_back(std::move(info));
  }
  return entries;
}

Bytes ExtractZipEntry(ByteView archive, const ZipEntryInfo& info, bool* crc_ok) {
  ByteReader r(archive, ErrorCode::kCorruptEntry);
  r.Seek(info.local_header_offset);
  if (r.U32() != kLocalHeaderSig) {
    throw Error(ErrorCode::kCorruptEntry, "bad local header for " + info.name);
  }
  r.Skip(22);
  const std::uint16_t name_len = r.U16();
  const std::uint16_t extra_len = r.U16();
  r.Skip(name_len + extra_len);
  ByteView payload = r.Take(info.compressed_size);

  Bytes data;
  switch (info.method) {
    case 0:
      if (info.compressed_size != info.uncompressed_size) {
        throw Error(ErrorCode::kCorruptEntry, "stored entry size mismatch for " + info.name);
      }
      data.assign(payload.begin(), payload.end());
      break;
    case 8:
      data = Inflate(payload, info.uncompressed_size, info.name);
      break;
    default:
      throw Error(ErrorCode::kNotSupported,
                  "compression method " + std::to_string(info.method) + " for " + info.name);
  }
  if (crc_ok != nullptr) *crc_ok = Crc32(data) == info.crc32;
  return data;
}

ApkBundle OpenApkBytes(ByteView archive, std::filesystem::path source_path) {
  ApkBundle bundle;
  bundle.source_path = std::move(source_path);
  auto entries = ListZipEntries(archive);

  // Last central-directory entry wins for duplicate names.
  std::map<std::string, std::size_t> last_index;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto [it, inserted] = last_index.emplace(entries[i].name, i);
    if (!inserted) {
      bundle.warnings.push_back("duplicate entry " + entries[i].name + "; last one wins");
      it->second = i;
    }
  }

  auto extract = [&](const ZipEntryInfo& info) {
    bool crc_ok = true;
    ApkEntry entry{info.name, ExtractZipEntry(archive, info, &crc_ok), false};
    if (!crc_ok) {
      entry.crc_mismatch = true;
      bundle.warnings.push_back("CorruptEntry: CRC-32 mismatch in " + info.name);
    }
    return entry;
  };

  bool have_manifest = false;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& info = entries[i];
    if (last_index[info.name] != i) continue;
    if (DexOrdinal(info.name) != 0) {
      bundle.dex_entries.push_back(extract(info));
    } else if (info.name == "AndroidManifest.xml") {
      bundle.manifest_bytes = extract(info).bytes;
      have_manifest = true;
    } else if (info.name == "resources.arsc" || IsStringsResource(info.name)) {
      bundle.resource_entries.push_back(extract(info));
    }
  }

  if (bundle.dex_entries.empty()) throw Error(ErrorCode::kMissingDex, "no classes*.dex entries");
  if (!have_manifest || bundle.manifest_bytes.empty()) {
    throw Error(ErrorCode::kMissingManifest, "no AndroidManifest.xml entry");
  }
  std::sort(bundle.dex_entries.begin(), bundle.dex_entries.end(),
            [](const ApkEntry& a, const ApkEntry& b) {
              return DexOrdinal(a.name) < DexOrdinal(b.name);
            });
  for (const auto& dex : bundle.dex_entries) {
    if (dex.bytes.size() < kMinDexSize) {
      throw Error(ErrorCode::kCorruptEntry,
                  dex.name + " is " + std::to_string(dex.bytes.size()) +
                      " bytes, smaller than a DEX header");
    }
  }
  return bundle;
}

ApkBundle OpenApk(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot stat " + path.string());
  if (size > 0xffffffffull) {
    throw Error(ErrorCode::kNotSupported, "archives larger than 4 GiB require Zip64");
  }
  Bytes data = ReadFile(path);
  return OpenApkBytes(data, path);
}

Bytes ConcatDexBytes(const ApkBundle& bundle) {
  Bytes out;
  std::size_t total = 0;
  for (const auto& e : bundle.dex_entries) total += e.bytes.size();
  out.reserve(total);
  for (const auto& e : bundle.dex_entries) out.insert(out.end(), e.bytes.begin(), e.bytes.end());
  return out;
}

void ZipWriter::Add(std::string name, ByteView data, Method method) {
  Pending p{std::move(name), method, Crc32(data), static_cast<std::uint32_t>(data.size()), {}};
  if (method == Method::kStored) {
    p.payload.assign(data.begin(), data.end());
  } else {
    z_stream zs{};
    deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY);
    p.payload.resize(deflateBound(&zs, static_cast<uLong>(data.size())));
    zs.next_in = const_cast<Bytef*>(data.data());
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = p.payload.data();
    zs.avail_out = static_cast<uInt>(p.payload.size());
    deflate(&zs, Z_FINISH);
    p.payload.resize(zs.total_out);
    deflateEnd(&zs);
  }
  entries_.push_back(std::move(p));
}

Bytes ZipWriter::Finish() const {
  ByteWriter w;
  std::vector<std::uint32_t> offsets;
  for (const auto& e : entries_) {
    offsets.push_back(static_cast<std::uint32_t>(w.size()));
    w.U32(kLocalHeaderSig);
    w.U16(20);
    w.U16(0);
    w.U16(static_cast<std::uint16_t>(e.method));
    w.U16(0);
    w.U16(0x21);  // 1980-01-01
    w.U32(e.crc);
    w.U32(static_cast<std::uint32_t>(e.payload.size()));
    w.U32(e.raw_size);
    w.U16(static_cast<std::uint16_t>(e.name.size()));
    w.U16(0);
    w.Append(e.name);
    w.Append(e.payload);
  }
  const auto cd_offset = static_cast<std::uint32_t>(w.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    w.U32(kCentralHeaderSig);
    w.U16(20);
    w.U16(20);
    w.U16(0);
    w.U16(static_cast<std::uint16_t>(e.method));
    w.U16(0);
    w.U16(0x21);
    w.U32(e.crc);
    w.U32(static_cast<std::uint32_t>(e.payload.size()));
    w.U32(e.raw_size);
    w.U16(static_cast<std::uint16_t>(e.name.size()));
    w.U16(0);
    w.U16(0);
    w.U16(0);
    w.U16(0);
    w.U32(0);
    w.U32(offsets[i]);
    w.Append(e.name);
  }
  const auto cd_size = static_cast<std::uint32_t>(w.size() - cd_offset);
  w.U32(kEndOfCentralDirSig);
  w.U16(0);
  w.U16(0);
  w.U16(static_cast<std::uint16_t>(entries_.size()));
  w.U16(static_cast<std::uint16_t>(entries_.size()));
  w.U32(cd_size);
  w.U32(cd_offset);
  w.U16(0);
  return w.Release();
}

}  // namespace bctx
