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

#include <compare>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "bctx/bytes.h"
#include "bctx/xml.h"

namespace bctx {

enum class ComponentKind { kActivity, kService, kReceiver, kProvider };

std::string_view ComponentKindName(ComponentKind kind);

struct Component {
  ComponentKind kind;
  std::string name;  // fully qualified, dotted
  friend auto operator<=>(const Component&, const Component&) = default;
};

struct ManifestFacts {
  std::string package;
  std::set<std::string> permissions;
  std::set<Component> components;
  std::set<std::string> actions;
  // (component name, action) for every intent-filter action.
  std::set<std::pair<std::string, std::string>> component_actions;

  friend bool operator==(const ManifestFacts&, const ManifestFacts&) = default;
};

// Accepts binary XML (leading chunk type 0x0003) or plain XML text.
ManifestFacts ParseManifest(ByteView bytes);
ManifestFacts ExtractManifestFacts(const XmlElement& root);

// ".Foo" and "Foo" resolve against the package; dotted names are kept.
std::string QualifyComponentName(std::string_view package, std::string_view name);

struct NetConstant;

// Namespaced context tokens of one app, sorted and unique:
// perm:<p>, comp:<kind>:<name>, act:<a>, net:<normalized address>.
std::vector<std::string> ContextTokens(const ManifestFacts& facts,
                                       const std::vector<NetConstant>& net_constants);

// Lexicographically ordered token list; immutable once built.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> sorted_tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  // Position of a token, or -1.
  std::ptrdiff_t IndexOf(std::string_view token) const;
  // SHA-256 over the newline-joined token list.
  std::string Fingerprint() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Keeps tokens present in at least min_df apps. Throws EmptyTraining when
// no apps are supplied and BadConfig when min_df is 0.
Vocabulary BuildVocabulary(const std::vector<std::vector<std::string>>& app_tokens,
                           std::size_t min_df = 1);

struct ContextVector {
  std::vector<std::uint8_t> bits;
  friend bool operator==(const ContextVector&, const ContextVector&) = default;
};

// Unseen tokens are ignored; duplicates have no effect.
ContextVector Vectorize(const std::vector<std::string>& app_tokens, const Vocabulary& vocab);

}  // namespace bctx
