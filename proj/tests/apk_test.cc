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

#include "bctx/apk.h"
#include "bctx/dex_forge.h"
#include "oracles.h"

namespace bctx {
namespace {

using oracle::ThrownCode;

Bytes SmallDex(const std::string& type) {
  dex::DexSpec spec;
  spec.classes.push_back({type});
  return dex::ForgeDex(spec);
}

TEST(Zip, RoundTripsStoredAndDeflate) {
  ZipWriter w;
  const std::string text(5000, 'a');
  w.Add("a.txt", AsBytes(text), ZipWriter::Method::kDeflate);
  w.Add("dir/b.bin", AsBytes("xyz"), ZipWriter::Method::kStored);
  w.Add("empty", {}, ZipWriter::Method::kDeflate);
  const Bytes zip = w.Finish();
  const auto entries = ListZipEntries(zip);
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_EQ(entries[0].method, 8);
  EXPECT_LT(entries[0].compressed_size, 5000u);
  EXPECT_EQ(entries[1].method, 0);
  bool ok = false;
  EXPECT_EQ(ExtractZipEntry(zip, entries[0], &ok), Bytes(text.begin(), text.end()));
  EXPECT_TRUE(ok);
  EXPECT_EQ(ExtractZipEntry(zip, entries[1]), (Bytes{'x', 'y', 'z'}));
  EXPECT_TRUE(ExtractZipEntry(zip, entries[2]).empty());
}

TEST(Zip, RejectsNonArchives) {
  EXPECT_EQ(ThrownCode([] { ListZipEntries(AsBytes("definitely not a zip file at all")); }), ErrorCode::kNotAZip);
  EXPECT_EQ(ThrownCode([] { ListZipEntries({}); }), ErrorCode::kNotAZip);
}

TEST(Apk, OrdersDexEntriesByOrdinal) {
  ZipWriter w;
  w.Add("classes10.dex", SmallDex("LTen;"));
  w.Add("AndroidManifest.xml", AsBytes("<manifest package=\"a.b\"/>"));
  w.Add("classes2.dex", SmallDex("LTwo;"));
  w.Add("classes.dex", SmallDex("LOne;"));
  w.Add("assets/classes3.dex", SmallDex("LNope;"));
  w.Add("res/values/strings.xml", AsBytes("<resources/>"));
  w.Add("res/drawable/icon.png", AsBytes("png"));
  const auto bundle = OpenApkBytes(w.Finish());
  ASSERT_EQ(bundle.dex_entries.size(), 3u);
  EXPECT_EQ(bundle.dex_entries[0].name, "classes.dex");
  EXPECT_EQ(bundle.dex_entries[1].name, "classes2.dex");
  EXPECT_EQ(bundle.dex_entries[2].name, "classes10.dex");
  ASSERT_EQ(bundle.resource_entries.size(), 1u);
  EXPECT_EQ(bundle.resource_entries[0].name, "res/values/strings.xml");
  const Bytes concat = ConcatDexBytes(bundle);
  EXPECT_EQ(concat.size(), bundle.dex_entries[0].bytes.size() + bundle.dex_entries[1].bytes.size() +
                               bundle.dex_entries[2].bytes.size());
}

TEST(Apk, DexOrdinal) {
  EXPECT_EQ(DexOrdinal("classes.dex"), 1u);
  EXPECT_EQ(DexOrdinal("classes2.dex"), 2u);
  EXPECT_EQ(DexOrdinal("classes12.dex"), 12u);
  EXPECT_EQ(DexOrdinal("classes1.dex"), 0u);
  EXPECT_EQ(DexOrdinal("classesX.dex"), 0u);
  EXPECT_EQ(DexOrdinal("lib/classes.dex"), 0u);
}

TEST(Apk, MissingPartsAreReported) {
  ZipWriter no_dex;
  no_dex.Add("AndroidManifest.xml", AsBytes("<manifest/>"));
  EXPECT_EQ(ThrownCode([&] { OpenApkBytes(no_dex.Finish()); }), ErrorCode::kMissingDex);
  ZipWriter no_manifest;
  no_manifest.Add("classes.dex", SmallDex("LA;"));
  EXPECT_EQ(ThrownCode([&] { OpenApkBytes(no_manifest.Finish()); }), ErrorCode::kMissingManifest);
  ZipWriter tiny;
  tiny.Add("classes.dex", AsBytes("dex\n035"));
  tiny.Add("AndroidManifest.xml", AsBytes("<manifest/>"));
  EXPECT_EQ(ThrownCode([&] { OpenApkBytes(tiny.Finish()); }), ErrorCode::kCorruptEntry);
}

TEST(Apk, CrcMismatchIsFlaggedNotFatal) {
  const Bytes dex = SmallDex("LA;");
  ZipWriter w;
  w.Add("classes.dex", dex, ZipWriter::Method::kStored);
  w.Add("AndroidManifest.xml", AsBytes("<manifest/>"), ZipWriter::Method::kStored);
  Bytes zip = w.Finish();
  // The stored dex payload follows the 30-byte local header and the name.
  zip[30 + 11 + 50] ^= 0xff;
  const auto bundle = OpenApkBytes(zip);
  ASSERT_EQ(bundle.dex_entries.size(), 1u);
  EXPECT_TRUE(bundle.dex_entries[0].crc_mismatch);
  EXPECT_FALSE(bundle.warnings.empty());
}

TEST(Apk, CorruptDeflateStream) {
  ZipWriter w;
  w.Add("classes.dex", SmallDex("LA;"), ZipWriter::Method::kDeflate);
  w.Add("AndroidManifest.xml", AsBytes("<manifest/>"), ZipWriter::Method::kStored);
  Bytes zip = w.Finish();
  for (std::size_t i = 30 + 11; i < 30 + 11 + 20; ++i) zip[i] = 0xff;
  EXPECT_EQ(ThrownCode([&] { OpenApkBytes(zip); }), ErrorCode::kCorruptEntry);
}

TEST(Apk, OpenFromDisk) {
  ZipWriter w;
  w.Add("classes.dex", SmallDex("LA;"));
  w.Add("AndroidManifest.xml", AsBytes("<manifest/>"));
  const auto path = std::filesystem::temp_directory_path() / "bctx_apk_test.apk";
  WriteFile(path, w.Finish());
  const auto bundle = OpenApk(path);
  EXPECT_EQ(bundle.source_path, path);
  EXPECT_EQ(bundle.dex_entries.size(), 1u);
  std::filesystem::remove(path);
  EXPECT_EQ(ThrownCode([&] { OpenApk(path); }), ErrorCode::kIoError);
}

}  // namespace
}  // namespace bctx
