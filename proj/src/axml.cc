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

#include "bctx/axml.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>

namespace bctx {
namespace {

constexpr std::uint32_t kNoString = 0xffffffff;
constexpr std::uint32_t kUtf8Flag = 1u << 8;

constexpr std::uint8_t kTypeNull = 0x00;
constexpr std::uint8_t kTypeReference = 0x01;
constexpr std::uint8_t kTypeString = 0x03;
constexpr std::uint8_t kTypeIntDec = 0x10;
constexpr std::uint8_t kTypeIntHex = 0x11;
constexpr std::uint8_t kTypeIntBoolean = 0x12;

// Framework attribute ids for android: attributes the pipeline reads. The
// resource map lets obfuscated manifests drop the attribute name strings.
const std::map<std::string, std::uint32_t>& AndroidAttrIds() {
  static const std::map<std::string, std::uint32_t> ids = {
      {"label", 0x01010001}, {"icon", 0x01010002},     {"name", 0x01010003},
      {"permission", 0x01010006}, {"exported", 0x01010010}, {"authorities", 0x01010018},
      {"priority", 0x0101001c}, {"enabled", 0x0101000e},
  };
  return ids;
}

std::string NameForAttrId(std::uint32_t id) {
  for (const auto& [name, value] : AndroidAttrIds()) {
    if (value == id) return name;
  }
  return {};
}

void Utf16ToUtf8(std::span<const char16_t> in, std::string& out) {
  for (std::size_t i = 0; i < in.size(); ++i) {
    std::uint32_t cp = in[i];
    if (cp >= 0xd800 && cp <= 0xdbff && i + 1 < in.size() && in[i + 1] >= 0xdc00 && in[i + 1] <= 0xdfff) {
      cp = 0x10000 + ((cp - 0xd800) << 10) + (in[i + 1] - 0xdc00);
      ++i;
    }
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }
}

std::u16string Utf8ToUtf16(std::string_view s) {
  std::u16string out;
  for (std::size_t i = 0; i < s.size();) {
    const auto b0 = static_cast<std::uint8_t>(s[i]);
    std::uint32_t cp;
    std::size_t len = b0 < 0x80 ? 1 : (b0 & 0xe0) == 0xc0 ? 2 : (b0 & 0xf0) == 0xe0 ? 3 : 4;
    cp = len == 1 ? b0 : len == 2 ? (b0 & 0x1f) : len == 3 ? (b0 & 0x0f) : (b0 & 0x07);
    for (std::size_t k = 1; k < len && i + k < s.size(); ++k) {
      cp = (cp << 6) | (static_cast<std::uint8_t>(s[i + k]) & 0x3f);
    }
    i += len;
    if (cp >= 0x10000) {
      cp -= 0x10000;
      out.push_back(static_cast<char16_t>(0xd800 + (cp >> 10)));
      out.push_back(static_cast<char16_t>(0xdc00 + (cp & 0x3ff)));
    } else {
      out.push_back(static_cast<char16_t>(cp));
    }
  }
  return out;
}

struct ChunkHeader {
  std::uint16_t type;
  std::uint16_t header_size;
  std::uint32_t size;
};

ChunkHeader ReadChunkHeader(ByteView data, std::size_t off, std::size_t end) {
  if (off + 8 > end) throw Error(ErrorCode::kBadChunk, "truncated chunk header at " + std::to_string(off));
  ChunkHeader h{LoadU16(data, off), LoadU16(data, off + 2), LoadU32(data, off + 4)};
  if (h.header_size < 8 || h.size < h.header_size || h.size > end - off) {
    throw Error(ErrorCode::kBadChunk, "chunk 0x" + std::to_string(h.type) + " at " +
                                          std::to_string(off) + " has invalid sizes");
  }
  return h;
}

std::string FormatTypedValue(std::uint8_t type, std::uint32_t data) {
  char buf[32];
  switch (type) {
    case kTypeNull: return {};
    case kTypeReference: std::snprintf(buf, sizeof buf, "@0x%08x", data); return buf;
    case kTypeIntHex: std::snprintf(buf, sizeof buf, "0x%x", data); return buf;
    case kTypeIntBoolean: return data != 0 ? "true" : "false";
    case kTypeIntDec: return std::to_string(static_cast<std::int32_t>(data));
    default: return std::to_string(data);
  }
}

}  // namespace

std::vector<std::string> ReadStringPool(ByteView chunk) {
  auto fail = [](const std::string& what) { return Error(ErrorCode::kBadStringPool, what); };
  if (chunk.size() < 28) throw fail("string pool header truncated");
  const std::uint16_t header_size = LoadU16(chunk, 2);
  const std::uint32_t size = LoadU32(chunk, 4);
  const std::uint32_t count = LoadU32(chunk, 8);
  const std::uint32_t flags = LoadU32(chunk, 16);
  const std::uint32_t strings_start = LoadU32(chunk, 20);
  if (LoadU16(chunk, 0) != kResStringPoolType || header_size < 28 || size > chunk.size() ||
      size < header_size) {
    throw fail("bad string pool header");
  }
  if (std::uint64_t{header_size} + std::uint64_t{count} * 4 > size ||
      (count > 0 && strings_start >= size)) {
    throw fail("string pool offsets outside chunk");
  }
  const bool utf8 = (flags & kUtf8Flag) != 0;
  std::vector<std::string> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::size_t p = std::size_t{strings_start} + LoadU32(chunk, header_size + 4 * i);
    auto need = [&](std::size_t n) {
      if (p + n > size) throw fail("string " + std::to_string(i) + " overruns pool");
    };
    std::string s;
    if (utf8) {
      auto read_len = [&] {
        need(1);
        std::size_t len = chunk[p++];
        if (len & 0x80) {
          need(1);
          len = ((len & 0x7f) << 8) | chunk[p++];
        }
        return len;
      };
      read_len();  // UTF-16 length, unused
      const std::size_t bytes = read_len();
      need(bytes);
      s.assign(reinterpret_cast<const char*>(chunk.data() + p), bytes);
    } else {
      need(2);
      std::size_t len = LoadU16(chunk, p);
      p += 2;
      if (len & 0x8000) {
        need(2);
        len = ((len & 0x7fff) << 16) | LoadU16(chunk, p);
        p += 2;
      }
      need(2 * len);
      std::u16string units(len, u'\0');
      for (std::size_t k = 0; k < len; ++k) units[k] = static_cast<char16_t>(LoadU16(chunk, p + 2 * k));
      Utf16ToUtf8(units, s);
    }
    out.push_back(std::move(s));
  }
  return out;
}

Bytes WriteStringPool(const std::vector<std::string>& strings, bool utf8) {
  ByteWriter data;
  std::vector<std::uint32_t> offsets;
  for (const auto& s : strings) {
    offsets.push_back(static_cast<std::uint32_t>(data.size()));
    const std::u16string units = Utf8ToUtf16(s);
    if (utf8) {
      auto write_len = [&data](std::size_t len) {
        if (len > 0x7f) data.U8(static_cast<std::uint8_t>(0x80 | (len >> 8)));
        data.U8(static_cast<std::uint8_t>(len & 0xff));
      };
      write_len(units.size());
      write_len(s.size());
      data.Append(s);
      data.U8(0);
    } else {
      if (units.size() > 0x7fff) {
        data.U16(static_cast<std::uint16_t>(0x8000 | (units.size() >> 16)));
      }
      data.U16(static_cast<std::uint16_t>(units.size() & 0xffff));
      for (char16_t u : units) data.U16(u);
      data.U16(0);
    }
  }
  data.AlignTo(4);

  const std::uint32_t header_size = 28;
  const auto strings_start = static_cast<std::uint32_t>(header_size + 4 * strings.size());
  ByteWriter w;
  w.U16(kResStringPoolType);
  w.U16(header_size);
  w.U32(static_cast<std::uint32_t>(strings_start + data.size()));
  w.U32(static_cast<std::uint32_t>(strings.size()));
  w.U32(0);  // styles
  w.U32(utf8 ? kUtf8Flag : 0);
  w.U32(strings.empty() ? 0 : strings_start);
  w.U32(0);
  for (auto off : offsets) w.U32(off);
  w.Append(data.bytes());
  return w.Release();
}

XmlElement ParseAxml(ByteView bytes) {
  const ChunkHeader top = ReadChunkHeader(bytes, 0, bytes.size());
  if (top.type != kResXmlType) throw Error(ErrorCode::kBadChunk, "not a binary XML document");

  std::vector<std::string> pool;
  std::vector<std::uint32_t> resource_ids;
  std::vector<std::pair<std::string, std::string>> pending_ns;
  std::vector<XmlElement> stack;
  std::optional<XmlElement> root;

  auto str = [&](std::uint32_t idx) -> std::string {
    if (idx == kNoString) return {};
    if (idx >= pool.size()) throw Error(ErrorCode::kBadStringPool, "string index " + std::to_string(idx));
    return pool[idx];
  };

  std::size_t off = top.header_size;
  while (off < top.size) {
    const ChunkHeader h = ReadChunkHeader(bytes, off, top.size);
    const ByteView chunk = bytes.subspan(off, h.size);
    ByteReader r(chunk, ErrorCode::kBadChunk);
    r.Seek(h.header_size);
    switch (h.type) {
      case kResStringPoolType:
        pool = ReadStringPool(chunk);
        break;
      case kResXmlResourceMapType:
        resource_ids.clear();
        while (r.remaining() >= 4) resource_ids.push_back(r.U32());
        break;
      case kResXmlStartNamespaceType: {
        const auto prefix = r.U32();
        const auto uri = r.U32();
        pending_ns.emplace_back(str(prefix), str(uri));
        break;
      }
      case kResXmlEndNamespaceType:
        break;
      case kResXmlStartElementType: {
        XmlElement e;
        e.namespaces = std::move(pending_ns);
        pending_ns.clear();
        e.ns = str(r.U32());
        e.name = str(r.U32());
        const std::uint16_t attr_start = r.U16();
        const std::uint16_t attr_size = r.U16();
        const std::uint16_t attr_count = r.U16();
        if (attr_size < 20) throw Error(ErrorCode::kBadChunk, "attribute records too small");
        for (std::uint16_t i = 0; i < attr_count; ++i) {
          r.Seek(h.header_size + attr_start + std::size_t{i} * attr_size);
          XmlAttribute a;
          a.ns = str(r.U32());
          const std::uint32_t name_idx = r.U32();
          a.name = str(name_idx);
          if (name_idx < resource_ids.size()) {
            std::string known = NameForAttrId(resource_ids[name_idx]);
            if (!known.empty()) a.name = std::move(known);
          }
          const std::uint32_t raw = r.U32();
          r.U16();  // value size
          r.U8();
          const std::uint8_t type = r.U8();
          const std::uint32_t data = r.U32();
          if (raw != kNoString) {
            a.value = str(raw);
          } else if (type == kTypeString) {
            a.value = str(data);
          } else {
            a.value = FormatTypedValue(type, data);
          }
          e.attributes.push_back(std::move(a));
        }
        stack.push_back(std::move(e));
        break;
      }
      case kResXmlEndElementType: {
        if (stack.empty()) throw Error(ErrorCode::kBadChunk, "end element without start");
        r.U32();
        if (str(r.U32()) != stack.back().name) {
          throw Error(ErrorCode::kBadChunk, "end element does not match </" + stack.back().name + ">");
        }
        XmlElement done = std::move(stack.back());
        stack.pop_back();
        if (stack.empty()) {
          if (root) throw Error(ErrorCode::kBadChunk, "multiple root elements");
          root = std::move(done);
        } else {
          stack.back().children.push_back(std::move(done));
        }
        break;
      }
      case kResXmlCdataType:
        if (!stack.empty()) stack.back().text += str(r.U32());
        break;
      default:
        break;  // unknown chunks are skipped by size
    }
    off += h.size;
  }
  if (!stack.empty() || !root) throw Error(ErrorCode::kBadChunk, "unbalanced element chunks");
  return std::move(*root);
}

Bytes ForgeAxml(const XmlElement& root) {
  // Attribute names with resource ids come first so the resource map indexes
  // the pool directly.
  std::vector<std::string> pool;
  std::map<std::string, std::uint32_t> index;
  std::vector<std::uint32_t> resource_ids;
  std::map<std::string, std::uint32_t> attr_name_index;  // android: attributes with ids

  auto visit = [](const XmlElement& e, auto&& fn, auto&& self) -> void {
    fn(e);
    for (const auto& c : e.children) self(c, fn, self);
  };
  visit(root, [&](const XmlElement& e) {
    for (const auto& a : e.attributes) {
      if (a.ns != kAndroidNamespace) continue;
      auto id = AndroidAttrIds().find(a.name);
      if (id == AndroidAttrIds().end() || attr_name_index.contains(a.name)) continue;
      attr_name_index[a.name] = static_cast<std::uint32_t>(pool.size());
      pool.push_back(a.name);
      resource_ids.push_back(id->second);
    }
  }, visit);
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, static_cast<std::uint32_t>(pool.size()));
    if (inserted) pool.push_back(s);
    return it->second;
  };
  auto attr_name_ref = [&](const XmlAttribute& a) {
    if (a.ns == kAndroidNamespace) {
      if (auto it = attr_name_index.find(a.name); it != attr_name_index.end()) return it->second;
    }
    return intern(a.name);
  };
  auto ns_ref = [&](const std::string& uri) { return uri.empty() ? kNoString : intern(uri); };

  ByteWriter body;
  std::uint32_t line = 1;
  auto node_header = [&](std::uint16_t type, std::uint32_t size) {
    body.U16(type);
    body.U16(16);
    body.U32(size);
    body.U32(line++);
    body.U32(kNoString);
  };

  auto emit = [&](const XmlElement& e, auto&& self) -> void {
    for (const auto& [prefix, uri] : e.namespaces) {
      node_header(kResXmlStartNamespaceType, 24);
      body.U32(intern(prefix));
      body.U32(intern(uri));
    }
    const auto count = static_cast<std::uint16_t>(e.attributes.size());
    node_header(kResXmlStartElementType, 16 + 20 + 20u * count);
    body.U32(ns_ref(e.ns));
    body.U32(intern(e.name));
    body.U16(20);
    body.U16(20);
    body.U16(count);
    body.U16(0);
    body.U16(0);
    body.U16(0);
    for (const auto& a : e.attributes) {
      body.U32(ns_ref(a.ns));
      body.U32(attr_name_ref(a));
      std::int32_t int_value = 0;
      auto [ptr, ec] = std::from_chars(a.value.data(), a.value.data() + a.value.size(), int_value);
      const bool canonical_int = ec == std::errc() && ptr == a.value.data() + a.value.size() &&
                                 std::to_string(int_value) == a.value;
      if (a.value == "true" || a.value == "false") {
        body.U32(kNoString);
        body.U16(8);
        body.U8(0);
        body.U8(kTypeIntBoolean);
        body.U32(a.value == "true" ? 0xffffffff : 0);
      } else if (canonical_int) {
        body.U32(kNoString);
        body.U16(8);
        body.U8(0);
        body.U8(kTypeIntDec);
        body.U32(static_cast<std::uint32_t>(int_value));
      } else {
        const auto v = intern(a.value);
        body.U32(v);
        body.U16(8);
        body.U8(0);
        body.U8(kTypeString);
        body.U32(v);
      }
    }
    if (!e.text.empty()) {
      node_header(kResXmlCdataType, 28);
      body.U32(intern(e.text));
      body.U16(8);
      body.U8(0);
      body.U8(kTypeNull);
      body.U32(0);
    }
    for (const auto& c : e.children) self(c, self);
    node_header(kResXmlEndElementType, 24);
    body.U32(ns_ref(e.ns));
    body.U32(intern(e.name));
    for (auto it = e.namespaces.rbegin(); it != e.namespaces.rend(); ++it) {
      node_header(kResXmlEndNamespaceType, 24);
      body.U32(intern(it->first));
      body.U32(intern(it->second));
    }
  };
  emit(root, emit);

  const Bytes string_pool = WriteStringPool(pool, false);
  ByteWriter w;
  w.U16(kResXmlType);
  w.U16(8);
  const std::size_t size_at = w.size();
  w.U32(0);
  w.Append(string_pool);
  if (!resource_ids.empty()) {
    w.U16(kResXmlResourceMapType);
    w.U16(8);
    w.U32(static_cast<std::uint32_t>(8 + 4 * resource_ids.size()));
    for (auto id : resource_ids) w.U32(id);
  }
  w.Append(body.bytes());
  w.PatchU32(size_at, static_cast<std::uint32_t>(w.size()));
  return w.Release();
}

std::vector<std::string> ReadArscGlobalStrings(ByteView bytes) {
  const ChunkHeader top = ReadChunkHeader(bytes, 0, bytes.size());
  if (top.type != kResTableType || top.header_size < 12) {
    throw Error(ErrorCode::kBadChunk, "not a resource table");
  }
  std::size_t off = top.header_size;
  while (off < top.size) {
    const ChunkHeader h = ReadChunkHeader(bytes, off, top.size);
    if (h.type == kResStringPoolType) return ReadStringPool(bytes.subspan(off, h.size));
    off += h.size;
  }
  return {};
}

Bytes ForgeArsc(const std::vector<std::string>& strings, bool utf8) {
  const Bytes pool = WriteStringPool(strings, utf8);
  ByteWriter w;
  w.U16(kResTableType);
  w.U16(12);
  w.U32(static_cast<std::uint32_t>(12 + pool.size()));
  w.U32(0);  // package count
  w.Append(pool);
  return w.Release();
}

}  // namespace bctx
