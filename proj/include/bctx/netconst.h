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

#include <optional>
#include <string>
#include <vector>

#include "bctx/apk.h"
#include "bctx/dex.h"

namespace bctx {

enum class NetKind { kUrl, kIp };
enum class NetOrigin { kDexConstString, kStringResource };

struct NetConstant {
  NetKind kind;
  std::string raw;
  std::string normalized;
  NetOrigin origin;
  friend bool operator==(const NetConstant&, const NetConstant&) = default;
};

// URL: http/https scheme, "://", host of letters/digits/dots/hyphens with at
// least one label, optional :port, optional path/query/fragment.
// IP: dotted quad of decimal octets 0-255.
// The whole (whitespace-trimmed) string must match.
std::optional<NetConstant> ClassifyNetString(std::string_view s, NetOrigin origin);

// Lowercases scheme and host and strips trailing '/' from URLs; drops leading
// zeros from IP octets. Idempotent. Returns the input unchanged when it is
// not a network address.
std::string NormalizeNetAddress(std::string_view s);

// Every const-string operand in every code item, in class/method/instruction order.
std::vector<NetConstant> ScanDexConstants(const dex::DexFile& dex);
// strings.xml bodies and resources.arsc global pool entries.
std::vector<NetConstant> ScanResources(const ApkBundle& bundle);

// Character data of <string> and string-array <item> elements.
std::vector<std::string> StringsXmlValues(std::string_view xml_text);

}  // namespace bctx
