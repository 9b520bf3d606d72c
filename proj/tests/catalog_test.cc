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

#include "bctx/catalog.h"
#include "oracles.h"

namespace bctx {
namespace {

using oracle::ThrownCode;

TEST(Catalog, DefaultCatalogLoads) {
  const SdkCatalog& c = DefaultCatalog();
  EXPECT_GE(c.size(), 20u);
  EXPECT_EQ(c.entries[0].library_id, "admob");
  EXPECT_EQ(c.entries[0].category, SdkCategory::kAds);
  EXPECT_EQ(c.Match("Lcom/google/android/gms/ads/AdView;"), 0);
  EXPECT_EQ(c.Match("Lcom/google/ads/Legacy;"), 0);
  EXPECT_EQ(c.Match("Lcom/example/Nothing;"), -1);
  EXPECT_EQ(ParseCatalog(DefaultCatalogText()).Fingerprint(), c.Fingerprint());
}

TEST(Catalog, ParsesAndMatchesFirstEntry) {
  const SdkCatalog c = ParseCatalog("# comment\n\nads1\tads\tLcom/a/\r\nmaps1\tmaps\tLcom/a/b/,Lorg/m/\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.entries[1].package_prefixes, (std::vector<std::string>{"Lcom/a/b/", "Lorg/m/"}));
  EXPECT_EQ(c.Match("Lcom/a/b/X;"), 0);
  EXPECT_EQ(c.Match("Lorg/m/Y;"), 1);
  EXPECT_EQ(c.Match("Lcom/ab/X;"), -1);
}

TEST(Catalog, FingerprintDependsOnOrder) {
  const auto a = ParseCatalog("x\tads\tLx/\ny\tother\tLy/\n");
  const auto b = ParseCatalog("y\tother\tLy/\nx\tads\tLx/\n");
  EXPECT_NE(a.Fingerprint(), b.Fingerprint());
}

TEST(Catalog, ReportsBadLines) {
  for (std::string_view bad : {"x\tads\n", "x\tweird\tLx/\n", "\tads\tLx/\n", "x\tads\tLx/\nx\tads\tLy/\n",
                               "x\tads\tcom/x\n"}) {
    EXPECT_EQ(ThrownCode([&] { ParseCatalog(bad); }), ErrorCode::kBadCatalogLine) << bad;
  }
  try {
    ParseCatalog("ok\tads\tLo/\n# c\nbad line\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

}  // namespace
}  // namespace bctx
