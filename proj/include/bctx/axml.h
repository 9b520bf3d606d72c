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
#include <vector>

#include "bctx/bytes.h"
#include "bctx/xml.h"

namespace bctx {

// Resource chunk types used by compiled XML and resource tables.
enum ResChunkType : std::uint16_t {
  kResNullType = 0x0000,
  kResStringPoolType = 0x0001,
  kResTableType = 0x0002,
  kResXmlType = 0x0003,
  kResXmlStartNamespaceType = 0x0100,
  kResXmlEndNamespaceType = 0x0101,
  kResXmlStartElementType = 0x0102,
  kResXmlEndElementType = 0x0103,
  kResXmlCdataType = 0x0104,
  kResXmlResourceMapType = 0x0180,
};

// Decodes a ResStringPool chunk (UTF-8 or UTF-16). `chunk` starts at the
// chunk header. Throws BadStringPool.
std::vector<std::string> ReadStringPool(ByteView chunk);
Bytes WriteStringPool(const std::vector<std::string>& strings, bool utf8);

// Decodes binary XML into an element tree. Throws BadChunk / BadStringPool.
XmlElement ParseAxml(ByteView bytes);
// Encodes a tree as binary XML with a UTF-16 string pool and a resource map
// for well-known android: attributes.
Bytes ForgeAxml(const XmlElement& root);

// Strings of the global string pool of a resources.arsc table.
std::vector<std::string> ReadArscGlobalStrings(ByteView bytes);
// A table chunk holding only a global string pool (no packages).
Bytes ForgeArsc(const std::vector<std::string>& strings, bool utf8 = true);

}  // namespace bctx
