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

#include "bctx/axml.h"
#include "bctx/xml.h"
#include "oracles.h"

namespace bctx {
namespace {

using oracle::ThrownCode;

constexpr std::string_view kManifest = R"(<?xml version="1.0" encoding="utf-8"?>
<!-- comment -->
<manifest xmlns:android="http://schemas.android.com/apk/res/android" package="com.x">
  <uses-permission android:name="android.permission.INTERNET"/>
  <application android:label="A &amp; B &#x41;&#66;">
    <activity android:name=".Main"><![CDATA[raw <text>]]></activity>
  </application>
</manifest>)";

TEST(PlainXml, ParsesNamespacesAndEntities) {
  const XmlElement root = ParsePlainXml(kManifest);
  EXPECT_EQ(root.name, "manifest");
  ASSERT_EQ(root.namespaces.size(), 1u);
  EXPECT_EQ(root.namespaces[0], (std::pair<std::string, std::string>{"android", std::string(kAndroidNamespace)}));
  ASSERT_EQ(root.children.size(), 2u);
  const auto* perm = root.children[0].FindAttribute(kAndroidNamespace, "name");
  ASSERT_NE(perm, nullptr);
  EXPECT_EQ(perm->value, "android.permission.INTERNET");
  const auto& app = root.children[1];
  EXPECT_EQ(app.FindAttribute(kAndroidNamespace, "label")->value, "A & B AB");
  EXPECT_EQ(app.children[0].text, "raw <text>");
  EXPECT_EQ(root.FindAttribute("", "package")->value, "com.x");
}

TEST(PlainXml, WriteThenParseIsIdentity) {
  const XmlElement root = ParsePlainXml(kManifest);
  EXPECT_EQ(ParsePlainXml(WritePlainXml(root)), root);
}

TEST(PlainXml, RejectsMalformedDocuments) {
  for (std::string_view bad : {"<a>", "<a></b>", "<a x='1' x='2'/>", "<!DOCTYPE a><a/>", "<a>&bogus;</a>",
                               "<a>&#x110000;</a>", "<a/><b/>", "", "<p:a/>", "<a b=c/>"}) {
    EXPECT_EQ(ThrownCode([&] { ParsePlainXml(bad); }), ErrorCode::kWellFormednessError) << bad;
  }
}

TEST(StringPool, RoundTripsBothEncodings) {
  const std::vector<std::string> strings = {"", "a", "caf\xC3\xA9", "\xF0\x9F\x98\x80", std::string(300, 'q')};
  for (bool utf8 : {true, false}) {
    EXPECT_EQ(ReadStringPool(WriteStringPool(strings, utf8)), strings) << utf8;
  }
}

TEST(StringPool, RejectsCorruptHeader) {
  Bytes pool = WriteStringPool({"a", "b"}, true);
  pool[8] = 0xff;  // string count
  pool[9] = 0xff;
  EXPECT_EQ(ThrownCode([&] { ReadStringPool(pool); }), ErrorCode::kBadStringPool);
  EXPECT_EQ(ThrownCode([&] { ReadStringPool(Bytes{1, 0}); }), ErrorCode::kBadStringPool);
}

TEST(Axml, ForgeThenParseIsIdentity) {
  const XmlElement root = ParsePlainXml(kManifest);
  const XmlElement parsed = ParseAxml(ForgeAxml(root));
  EXPECT_EQ(parsed.name, "manifest");
  EXPECT_EQ(parsed.namespaces, root.namespaces);
  EXPECT_EQ(parsed.attributes, root.attributes);
  ASSERT_EQ(parsed.children.size(), 2u);
  EXPECT_EQ(parsed.children[0].attributes, root.children[0].attributes);
  EXPECT_EQ(parsed.children[1].children[0].attributes, root.children[1].children[0].attributes);
}

TEST(Axml, RejectsGarbage) {
  EXPECT_TRUE(ThrownCode([] { ParseAxml(Bytes{0x03, 0x00, 0x08, 0x00, 0xff, 0xff, 0xff, 0x7f}); }).has_value());
  Bytes doc = ForgeAxml(ParsePlainXml("<a/>"));
  doc.resize(doc.size() - 4);
  const auto code = ThrownCode([&] { ParseAxml(doc); });
  ASSERT_TRUE(code.has_value());
  EXPECT_TRUE(*code == ErrorCode::kBadChunk || *code == ErrorCode::kBadStringPool);
}

TEST(Arsc, GlobalStrings) {
  const std::vector<std::string> strings = {"http://ads.example.com", "hello"};
  EXPECT_EQ(ReadArscGlobalStrings(ForgeArsc(strings, true)), strings);
  EXPECT_EQ(ReadArscGlobalStrings(ForgeArsc(strings, false)), strings);
}

}  // namespace
}  // namespace bctx
