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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bctx/catalog.h"
#include "bctx/dex.h"
#include "bctx/manifest.h"

namespace bctx {

using NodeId = std::uint32_t;

enum EdgeTag : std::uint8_t {
  kEdgeExplicit = 1 << 0,
  kEdgeImplicitLifecycle = 1 << 1,
  kEdgeImplicitHandler = 1 << 2,
  kEdgeIcc = 1 << 3,
  kEdgeEntry = 1 << 4,
};

std::string EdgeTagNames(std::uint8_t tags);

struct IccgNode {
  std::string signature;
  std::string defining_type;
  bool app_defined = false;
};

// Inter-component call graph rooted at a synthetic dummy main (node 0).
// Self-loops and edges into the dummy main are never stored; an edge added
// twice accumulates provenance tags.
class IccgGraph {
 public:
  static constexpr NodeId kDummyMain = 0;
  static constexpr std::string_view kDummyMainSignature = "<dummy-main>";

  IccgGraph();

  NodeId AddNode(const dex::MethodRef& method, bool app_defined);
  // Node for an arbitrary signature; used by tests and graph tools.
  NodeId AddNode(std::string signature, std::string defining_type, bool app_defined);
  // Returns false when the edge was dropped (self-loop or into dummy main).
  bool AddEdge(NodeId from, NodeId to, EdgeTag tag);

  std::optional<NodeId> Find(std::string_view signature) const;
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return tags_.size(); }
  const IccgNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<NodeId>& successors(NodeId id) const { return succ_.at(id); }
  std::size_t in_degree(NodeId id) const;
  // Provenance tags of an edge, 0 if absent.
  std::uint8_t tags(NodeId from, NodeId to) const;
  const std::map<std::pair<NodeId, NodeId>, std::uint8_t>& edges() const { return tags_; }

  std::string ToDot() const;
  std::string ToJson() const;

 private:
  std::vector<IccgNode> nodes_;
  std::vector<std::vector<NodeId>> succ_;
  std::unordered_map<std::string, NodeId> by_signature_;
  std::map<std::pair<NodeId, NodeId>, std::uint8_t> tags_;
};

// Fixed method-name lists used for implicit edges.
const std::vector<std::string>& LifecycleMethodNames(ComponentKind kind);
const std::vector<std::string>& HandlerMethodNames();
const std::vector<std::string>& IccSenderNames();

// "com.x.Main" <-> "Lcom/x/Main;"
std::string DottedToDescriptor(std::string_view dotted);
std::string DescriptorToDotted(std::string_view descriptor);

IccgGraph BuildIccg(std::span<const dex::DexFile> dexes, const ManifestFacts& manifest);

// Saturating per-library call-path counts, in catalog order.
struct LibUsageVector {
  std::vector<std::uint64_t> counts;
  friend bool operator==(const LibUsageVector&, const LibUsageVector&) = default;
};

// Path counts from the dummy main to each target set over the SCC
// condensation: paths(root) = 1, paths(v) = sum over condensed predecessors;
// each set's count sums paths(component(t)) over its targets. Unreachable
// targets contribute 0.
std::vector<std::uint64_t> CountPathsToTargets(const IccgGraph& graph,
                                               const std::vector<std::vector<NodeId>>& target_sets);
LibUsageVector CountPaths(const IccgGraph& graph, const SdkCatalog& catalog);

inline std::uint64_t SaturatingAdd(std::uint64_t a, std::uint64_t b) {
  return a > UINT64_MAX - b ? UINT64_MAX : a + b;
}

}  // namespace bctx
