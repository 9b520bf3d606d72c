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

#include "bctx/catalog.h"

#include <set>
#include <sstream>

#include "bctx/bytes.h"
#include "bctx/digest.h"
#include "sdk_catalog_data.h"

namespace bctx {
namespace {

bool ValidPrefix(std::string_view p) {
  if (p.size() < 2 || p[0] != 'L') return false;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const char c = p[i];
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '/' ||
                    (c == ';' && i + 1 == p.size());
    if (!ok) return false;
    if (c == '/' && (i == 1 || p[i - 1] == '/')) return false;
  }
  return true;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

}  // namespace

std::string_view SdkCategoryName(SdkCategory c) {
  switch (c) {
    case SdkCategory::kAds: return "ads";
    case SdkCategory::kMaps: return "maps";
    case SdkCategory::kPayments: return "payments";
    case SdkCategory::kOther: return "other";
  }
  return "other";
}

std::ptrdiff_t SdkCatalog::Match(std::string_view type_descriptor) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (const auto& p : entries[i].package_prefixes) {
      if (type_descriptor.starts_with(p)) return static_cast<std::ptrdiff_t>(i);
    }
  }
  return -1;
}

std::string SdkCatalog::Fingerprint() const {
  std::string canon;
  for (const auto& e : entries) {
    canon += e.library_id;
    canon += '\t';
    canon += SdkCategoryName(e.category);
    for (const auto& p : e.package_prefixes) {
      canon += '\t';
      canon += p;
    }
    canon += '\n';
  }
  return Sha256Hex(canon);
}

SdkCatalog ParseCatalog(std::string_view text) {
  SdkCatalog catalog;
  std::set<std::string, std::less<>> ids;
  std::size_t line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto fail = [line_no](const std::string& why) {
      return Error(ErrorCode::kBadCatalogLine, "line " + std::to_string(line_no) + ": " + why);
    };
    const auto fields = Split(line, '\t');
    if (fields.size() != 3) throw fail("expected 3 tab-separated fields");
    SdkEntry entry;
    entry.library_id = std::string(fields[0]);
    if (entry.library_id.empty()) throw fail("empty library id");
    if (!ids.insert(entry.library_id).second) throw fail("duplicate library id " + entry.library_id);
    if (fields[1] == "ads") entry.category = SdkCategory::kAds;
    else if (fields[1] == "maps") entry.category = SdkCategory::kMaps;
    else if (fields[1] == "payments") entry.category = SdkCategory::kPayments;
    else if (fields[1] == "other") entry.category = SdkCategory::kOther;
    else throw fail("unknown category " + std::string(fields[1]));
    for (auto prefix : Split(fields[2], ',')) {
      if (!ValidPrefix(prefix)) throw fail("invalid prefix '" + std::string(prefix) + "'");
      entry.package_prefixes.emplace_back(prefix);
    }
    catalog.entries.push_back(std::move(entry));
  }
  return catalog;
}

SdkCatalog LoadCatalog(const std::filesystem::path& path) {
  const Bytes data = ReadFile(path);
  return ParseCatalog(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::string_view DefaultCatalogText() { return kSdkCatalogText; }

const SdkCatalog& DefaultCatalog() {
  static const SdkCatalog catalog = ParseCatalog(kSdkCatalogText);
  return catalog;
}

}  // namespace bctx
