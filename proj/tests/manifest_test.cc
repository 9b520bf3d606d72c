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

#include "bctx/app_forge.h"
#include "bctx/axml.h"
#include "bctx/manifest.h"
#include "bctx/netconst.h"
#include "oracles.h"

namespace bctx {
namespace {

using oracle::ThrownCode;

AppSpec Sample() {
  AppSpec spec;
  spec.package = "com.shop";
  spec.permissions = {"android.permission.INTERNET", "android.permission.SEND_SMS"};
  spec.components = {{ComponentKind::kActivity, ".Main", {"android.intent.action.MAIN"}},
                     {ComponentKind::kService, "Sync", {}},
                     {ComponentKind::kReceiver, "org.other.Boot", {"android.intent.action.BOOT_COMPLETED"}},
                     {ComponentKind::kProvider, ".Data", {}}};
  return spec;
}

TEST(Manifest, BinaryAndPlainAgree) {
  const AppSpec spec = Sample();
  const std::string xml = ManifestXml(spec);
  const ManifestFacts plain = ParseManifest(AsBytes(xml));
  const ManifestFacts binary = ParseManifest(ForgeAxml(ParsePlainXml(xml)));
  EXPECT_EQ(plain, binary);
  EXPECT_EQ(plain.package, "com.shop");
  EXPECT_EQ(plain.permissions.size(), 2u);
  EXPECT_TRUE(plain.components.count({ComponentKind::kActivity, "com.shop.Main"}));
  EXPECT_TRUE(plain.components.count({ComponentKind::kService, "com.shop.Sync"}));
  EXPECT_TRUE(plain.components.count({ComponentKind::kReceiver, "org.other.Boot"}));
  EXPECT_TRUE(plain.components.count({ComponentKind::kProvider, "com.shop.Data"}));
  EXPECT_TRUE(plain.component_actions.count({"org.other.Boot", "android.intent.action.BOOT_COMPLETED"}));
}

TEST(Manifest, ActionsOutsideComponentsAreIgnored) {
  const auto facts = ParseManifest(AsBytes(
      "<manifest xmlns:android=\"http://schemas.android.com/apk/res/android\" package=\"p\">"
      "<intent-filter><action android:name=\"stray\"/></intent-filter>"
      "<application><activity android:name=\".A\"><action android:name=\"not-in-filter\"/>"
      "<intent-filter><action android:name=\"ok\"/></intent-filter></activity></application></manifest>"));
  EXPECT_EQ(facts.actions, (std::set<std::string>{"ok"}));
}

TEST(Manifest, RejectsUnknownEncoding) {
  EXPECT_EQ(ThrownCode([] { ParseManifest(Bytes{0x00, 0x01, 0x02}); }), ErrorCode::kBadChunk);
  EXPECT_EQ(ThrownCode([] { ParseManifest(AsBytes("<manifest>")); }), ErrorCode::kWellFormednessError);
}

TEST(Manifest, QualifiesNames) {
  EXPECT_EQ(QualifyComponentName("a.b", ".C"), "a.b.C");
  EXPECT_EQ(QualifyComponentName("a.b", "C"), "a.b.C");
  EXPECT_EQ(QualifyComponentName("a.b", "x.y.C"), "x.y.C");
}

TEST(ContextTokens, NamespacedSortedUnique) {
  ManifestFacts facts = ParseManifest(AsBytes(ManifestXml(Sample())));
  std::vector<NetConstant> net = {*ClassifyNetString("HTTP://Ads.Example.com/", NetOrigin::kDexConstString),
                                  *ClassifyNetString("http://ads.example.com", NetOrigin::kStringResource)};
  const auto tokens = ContextTokens(facts, net);
  EXPECT_TRUE(std::is_sorted(tokens.begin(), tokens.end()));
  EXPECT_EQ(std::adjacent_find(tokens.begin(), tokens.end()), tokens.end());
  EXPECT_EQ(std::count(tokens.begin(), tokens.end(), "net:http://ads.example.com"), 1);
  EXPECT_EQ(std::count(tokens.begin(), tokens.end(), "perm:android.permission.SEND_SMS"), 1);
  EXPECT_EQ(std::count(tokens.begin(), tokens.end(), "comp:service:com.shop.Sync"), 1);
  EXPECT_EQ(std::count(tokens.begin(), tokens.end(), "act:android.intent.action.MAIN"), 1);
}

TEST(Vocabulary, MinDfAndVectorize) {
  const std::vector<std::vector<std::string>> apps = {{"a", "b"}, {"b", "c"}, {"b", "d", "d"}};
  const Vocabulary all = BuildVocabulary(apps, 1);
  EXPECT_EQ(all.tokens(), (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_EQ(BuildVocabulary(apps, 2).tokens(), (std::vector<std::string>{"b"}));
  EXPECT_EQ(all.IndexOf("c"), 2);
  EXPECT_EQ(all.IndexOf("zz"), -1);
  EXPECT_EQ(Vectorize({"d", "unseen", "a", "a"}, all).bits, (std::vector<std::uint8_t>{1, 0, 0, 1}));
  EXPECT_EQ(ThrownCode([&] { BuildVocabulary(apps, 0); }), ErrorCode::kBadConfig);
  EXPECT_EQ(ThrownCode([] { BuildVocabulary({}, 1); }), ErrorCode::kEmptyTraining);
}

TEST(Vocabulary, FingerprintTracksContent) {
  const Vocabulary a(std::vector<std::string>{"x", "y"});
  const Vocabulary b(std::vector<std::string>{"x", "y"});
  const Vocabulary c(std::vector<std::string>{"x", "z"});
  EXPECT_EQ(a.Fingerprint(), b.Fingerprint());
  EXPECT_NE(a.Fingerprint(), c.Fingerprint());
  EXPECT_EQ(a.Fingerprint().size(), 64u);
}

}  // namespace
}  // namespace bctx
