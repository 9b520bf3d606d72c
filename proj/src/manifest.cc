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

#include "bctx/manifest.h"

#include <algorithm>
#include <map>

#include "bctx/axml.h"
#include "bctx/digest.h"
#include "bctx/netconst.h"

namespace bctx {
namespace {

std::optional<ComponentKind> KindForTag(std::string_view tag) {
  if (tag == "activity") return ComponentKind::kActivity;
  if (tag == "service") return ComponentKind::kService;
  if (tag == "receiver") return ComponentKind::kReceiver;
  if (tag == "provider") return ComponentKind::kProvider;
  return std::nullopt;
}

std::string AndroidName(const XmlElement& e) {
  const XmlAttribute* a = e.FindAttribute(kAndroidNamespace, "name");
  return a == nullptr ? std::string() : a->value;
}

void Walk(const XmlElement& e, ManifestFacts& facts, const Component* owner, bool in_filter) {
  if (e.name == "uses-permission" || e.name == "uses-permission-sdk-23") {
    if (auto name = AndroidName(e); !name.empty()) facts.permissions.insert(std::move(name));
  }
  std::optional<Component> component;
  if (auto kind = KindForTag(e.name)) {
    if (auto name = AndroidName(e); !name.empty()) {
      component = Component{*kind, QualifyComponentName(facts.package, name)};
      facts.components.insert(*component);
      owner = &*component;
    }
  }
  if (e.name == "action" && in_filter && owner != nullptr) {
    if (auto name = AndroidName(e); !name.empty()) {
      facts.actions.insert(name);
      facts.component_actions.emplace(owner->name, std::move(name));
    }
  }
  const bool child_in_filter = in_filter || (e.name == "intent-filter" && owner != nullptr);
  for (const auto& c : e.children) Walk(c, facts, owner, child_in_filter);
}

}  // namespace

std::string_view ComponentKindName(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::kActivity: return "activity";
    case ComponentKind::kService: return "service";
    case ComponentKind::kReceiver: return "receiver";
    case ComponentKind::kProvider: return "provider";
  }
  return "unknown";
}

std::string QualifyComponentName(std::string_view package, std::string_view name) {
  if (name.starts_with('.')) return std::string(package) + std::string(name);
  if (name.find('.') == std::string_view::npos && !package.empty()) {
    return std::string(package) + "." + std::string(name);
  }
  return std::string(name);
}

ManifestFacts ExtractManifestFacts(const XmlElement& root) {
  ManifestFacts facts;
  if (const XmlAttribute* pkg = root.FindAttribute("", "package")) facts.package = pkg->value;
  Walk(root, facts, nullptr, false);
  return facts;
}

ManifestFacts ParseManifest(ByteView bytes) {
  if (bytes.size() >= 2 && LoadU16(bytes, 0) == kResXmlType) {
    return ExtractManifestFacts(ParseAxml(bytes));
  }
  std::size_t i = 0;
  if (bytes.size() >= 3 && bytes[0] == 0xef && bytes[1] == 0xbb && bytes[2] == 0xbf) i = 3;
  while (i < bytes.size() && std::isspace(bytes[i])) ++i;
  if (i < bytes.size() && bytes[i] == '<') {
    return ExtractManifestFacts(ParsePlainXml(
        std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size())));
  }
  throw Error(ErrorCode::kBadChunk, "manifest is neither binary XML nor plain XML");
}

std::vector<std::string> ContextTokens(const ManifestFacts& facts,
                                       const std::vector<NetConstant>& net_constants) {
  std::vector<std::string> tokens;
  for (const auto& p : facts.permissions) tokens.push_back("perm:" + p);
  for (const auto& c : facts.components) {
    tokens.push_back("comp:" + std::string(ComponentKindName(c.kind)) + ":" + c.name);
  }
  for (const auto& a : facts.actions) tokens.push_back("act:" + a);
  for (const auto& n : net_constants) tokens.push_back("net:" + n.normalized);
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> sorted_tokens) : tokens_(std::move(sorted_tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw Error(ErrorCode::kBadConfig, "duplicate vocabulary token " + tokens_[i]);
    }
    if (i > 0 && !(tokens_[i - 1] < tokens_[i])) {
      throw Error(ErrorCode::kBadConfig, "vocabulary tokens must be sorted");
    }
  }
}

std::ptrdiff_t Vocabulary::IndexOf(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::string Vocabulary::Fingerprint() const {
  std::string joined;
  for (const auto& t : tokens_) {
    joined += t;
    joined.push_back('\n');
  }
  return Sha256Hex(joined);
}

Vocabulary BuildVocabulary(const std::vector<std::vector<std::string>>& app_tokens, std::size_t min_df) {
  if (min_df == 0) throw Error(ErrorCode::kBadConfig, "min_df must be at least 1");
  if (app_tokens.empty()) throw Error(ErrorCode::kEmptyTraining, "no training apps");
  std::map<std::string, std::size_t> df;
  for (const auto& app : app_tokens) {
    std::vector<std::string> unique(app);
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (auto& t : unique) ++df[std::move(t)];
  }
  std::vector<std::string> kept;
  for (const auto& [token, count] : df) {
    if (count >= min_df) kept.push_back(token);
  }
  return Vocabulary(std::move(kept));
}

ContextVector Vectorize(const std::vector<std::string>& app_tokens, const Vocabulary& vocab) {
  ContextVector v;
  v.bits.assign(vocab.size(), 0);
  for (const auto& t : app_tokens) {
    if (auto i = vocab.IndexOf(t); i >= 0) v.bits[static_cast<std::size_t>(i)] = 1;
  }
  return v;
}

}  // namespace bctx
