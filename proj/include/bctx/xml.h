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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bctx {

inline constexpr std::string_view kAndroidNamespace = "http://schemas.android.com/apk/res/android";

struct XmlAttribute {
  std::string ns;  // namespace URI, empty when unqualified
  std::string name;
  std::string value;
  friend bool operator==(const XmlAttribute&, const XmlAttribute&) = default;
};

// Element tree shared by the plain-text and binary (AXML) encodings.
struct XmlElement {
  std::string ns;
  std::string name;
  // (prefix, uri) pairs declared on this element.
  std::vector<std::pair<std::string, std::string>> namespaces;
  std::vector<XmlAttribute> attributes;
  std::vector<XmlElement> children;
  std::string text;  // concatenated character data directly inside this element

  const XmlAttribute* FindAttribute(std::string_view ns_uri, std::string_view local) const;
  friend bool operator==(const XmlElement&, const XmlElement&) = default;
};

// XML 1.0 subset: elements, attributes, namespaces, comments, processing
// instructions, CDATA and character references. DTDs are rejected. Throws
// WellFormednessError.
XmlElement ParsePlainXml(std::string_view text);

// Serializes with the prefixes declared in `namespaces`.
std::string WritePlainXml(const XmlElement& root);

}  // namespace bctx
