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

#include <filesystem>
#include <string>
#include <vector>

namespace bctx {

enum class SdkCategory { kAds, kMaps, kPayments, kOther };

std::string_view SdkCategoryName(SdkCategory c);

struct SdkEntry {
  std::string library_id;
  SdkCategory category;
  // Type-descriptor prefixes such as "Lcom/google/android/gms/ads/".
  std::vector<std::string> package_prefixes;
};

// Ordered third-party library list; entry order fixes the slot order of the
// library usage vector.
struct SdkCatalog {
  std::vector<SdkEntry> entries;

  std::size_t size() const { return entries.size(); }
  // Index of the first entry with a prefix matching the descriptor, or -1.
  std::ptrdiff_t Match(std::string_view type_descriptor) const;
  // SHA-256 over a canonical rendering of all entries.
  std::string Fingerprint() const;
};

// Parses `library_id<TAB>category<TAB>prefix[,prefix...]` lines; blank lines
// and lines starting with '#' are ignored. Throws BadCatalogLine naming the
// 1-based line number.
SdkCatalog ParseCatalog(std::string_view text);
SdkCatalog LoadCatalog(const std::filesystem::path& path);
// The catalog bundled with the library (data/sdk_catalog.tsv).
const SdkCatalog& DefaultCatalog();
std::string_view DefaultCatalogText();

}  // namespace bctx
