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

#include "bctx/netconst.h"

#include <cctype>

#include "bctx/axml.h"
#include "bctx/xml.h"

namespace bctx {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Parses a dotted quad; returns canonical text or nullopt.
std::optional<std::string> CanonicalIp(std::string_view s) {
  std::string out;
  int octets = 0;
  std::size_t i = 0;
  while (octets < 4) {
    std::size_t start = i;
    unsigned value = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])) && i - start < 3) {
      value = value * 10 + static_cast<unsigned>(s[i] - '0');
      ++i;
    }
    if (i == start || value > 255) return std::nullopt;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
    out += std::to_string(value);
    if (++octets < 4) {
      if (i >= s.size() || s[i] != '.') return std::nullopt;
      out.push_back('.');
      ++i;
    }
  }
  if (i != s.size()) return std::nullopt;
  return out;
}

struct UrlParts {
  std::string_view scheme, host, port, rest;
};

std::optional<UrlParts> SplitUrl(std::string_view s) {
  const auto sep = s.find("://");
  if (sep == std::string_view::npos) return std::nullopt;
  UrlParts u;
  u.scheme = s.substr(0, sep);
  const std::string scheme = Lower(u.scheme);
  if (scheme != "http" && scheme != "https") return std::nullopt;
  std::size_t i = sep + 3;
  const std::size_t host_start = i;
  bool label_start = true;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-') {
      label_start = false;
    } else if (c == '.') {
      if (label_start) return std::nullopt;  // empty label
      label_start = true;
    } else {
      break;
    }
    ++i;
  }
  u.host = s.substr(host_start, i - host_start);
  if (u.host.empty() || u.host.front() == '.') return std::nullopt;
  if (i < s.size() && s[i] == ':') {
    const std::size_t port_start = ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == port_start || i - port_start > 5) return std::nullopt;
    u.port = s.substr(port_start, i - port_start);
  }
  if (i < s.size() && s[i] != '/' && s[i] != '?' && s[i] != '#') return std::nullopt;
  u.rest = s.substr(i);
  for (char c : u.rest) {
    if (std::isspace(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) < 0x20) {
      return std::nullopt;
    }
  }
  return u;
}

std::string NormalizeUrl(const UrlParts& u) {
  std::string out = Lower(u.scheme) + "://" + Lower(u.host);
  if (!u.port.empty()) out += ":" + std::string(u.port);
  std::string_view rest = u.rest;
  while (!rest.empty() && rest.back() == '/') rest.remove_suffix(1);
  out += rest;
  return out;
}

void ScanText(std::string_view text, NetOrigin origin, std::vector<NetConstant>& out) {
  if (auto c = ClassifyNetString(text, origin)) out.push_back(std::move(*c));
}

}  // namespace

std::optional<NetConstant> ClassifyNetString(std::string_view s, NetOrigin origin) {
  const std::string_view t = Trim(s);
  if (t.empty() || t.size() > 4096) return std::nullopt;
  if (auto ip = CanonicalIp(t)) return NetConstant{NetKind::kIp, std::string(s), *ip, origin};
  if (auto url = SplitUrl(t)) return NetConstant{NetKind::kUrl, std::string(s), NormalizeUrl(*url), origin};
  return std::nullopt;
}

std::string NormalizeNetAddress(std::string_view s) {
  auto c = ClassifyNetString(s, NetOrigin::kDexConstString);
  return c ? c->normalized : std::string(s);
}

std::vector<NetConstant> ScanDexConstants(const dex::DexFile& dex) {
  std::vector<NetConstant> out;
  for (const auto& cls : dex.classes()) {
    for (const auto& m : cls.methods) {
      if (!m.code) continue;
      for (const auto& insn : m.code->insns) {
        if (insn.kind != dex::InsnKind::kConstString || !dex.string_ok(insn.index)) continue;
        ScanText(dex.string_at(insn.index), NetOrigin::kDexConstString, out);
      }
    }
  }
  return out;
}

std::vector<std::string> StringsXmlValues(std::string_view xml_text) {
  std::vector<std::string> values;
  const XmlElement root = ParsePlainXml(xml_text);
  auto visit = [&values](const XmlElement& e, bool in_array, auto&& self) -> void {
    if (e.name == "string" || (in_array && e.name == "item")) values.push_back(e.text);
    const bool array = e.name == "string-array" || e.name == "array";
    for (const auto& c : e.children) self(c, array, self);
  };
  visit(root, false, visit);
  return values;
}

std::vector<NetConstant> ScanResources(const ApkBundle& bundle) {
  std::vector<NetConstant> out;
  for (const auto& entry : bundle.resource_entries) {
    try {
      if (entry.name == "resources.arsc") {
        for (const auto& s : ReadArscGlobalStrings(entry.bytes)) ScanText(s, NetOrigin::kStringResource, out);
      } else {
        const std::string_view text(reinterpret_cast<const char*>(entry.bytes.data()), entry.bytes.size());
        for (const auto& s : StringsXmlValues(text)) ScanText(s, NetOrigin::kStringResource, out);
      }
    } catch (const Error&) {
      // Unreadable resources contribute no constants.
    }
  }
  return out;
}

}  // namespace bctx
