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

#include "bctx/iccg.h"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include <json.hpp>

namespace bctx {
namespace {

struct AppIndex {
  std::unordered_map<std::string, const dex::ClassDef*> classes;
  std::unordered_map<const dex::ClassDef*, const dex::DexFile*> owner;
  std::unordered_map<std::string, std::vector<std::string>> direct_subtypes;
  std::unordered_map<std::string, std::vector<std::string>> subtype_cache;

  explicit AppIndex(std::span<const dex::DexFile> dexes) {
    for (const auto& d : dexes) {
      for (const auto& cls : d.classes()) {
        if (classes.emplace(cls.this_type, &cls).second) owner.emplace(&cls, &d);  // first definition wins
      }
    }
    for (const auto& [type, cls] : classes) {
      if (cls->superclass_type) direct_subtypes[*cls->superclass_type].push_back(type);
      for (const auto& i : cls->interfaces) direct_subtypes[i].push_back(type);
    }
    for (auto& [type, subs] : direct_subtypes) std::sort(subs.begin(), subs.end());
  }

  const dex::EncodedMethod* FindMethod(const std::string& type, const std::string& name,
                                       const std::string& descriptor) const {
    auto it = classes.find(type);
    if (it == classes.end()) return nullptr;
    for (const auto& m : it->second->methods) {
      if (m.ref.name == name && m.ref.descriptor == descriptor) return &m;
    }
    return nullptr;
  }

  // Strict app subtypes of `type`, sorted.
  const std::vector<std::string>& Subtypes(const std::string& type) {
    if (auto it = subtype_cache.find(type); it != subtype_cache.end()) return it->second;
    std::set<std::string> seen;
    std::deque<std::string> work{type};
    while (!work.empty()) {
      auto t = std::move(work.front());
      work.pop_front();
      auto it = direct_subtypes.find(t);
      if (it == direct_subtypes.end()) continue;
      for (const auto& s : it->second) {
        if (s != type && seen.insert(s).second) work.push_back(s);
      }
    }
    return subtype_cache[type] = std::vector<std::string>(seen.begin(), seen.end());
  }

  // The type itself followed by its superclass chain (app classes, then the
  // first non-app ancestor if any). Cycles are cut.
  std::vector<std::string> SuperChain(const std::string& type) const {
    std::vector<std::string> chain{type};
    std::set<std::string> seen{type};
    for (;;) {
      auto it = classes.find(chain.back());
      if (it == classes.end() || !it->second->superclass_type) break;
      const auto& super = *it->second->superclass_type;
      if (!seen.insert(super).second) break;
      chain.push_back(super);
    }
    return chain;
  }
};

std::string SimpleName(std::string_view descriptor) {
  std::string dotted = DescriptorToDotted(descriptor);
  const auto dot = dotted.rfind('.');
  return dot == std::string::npos ? dotted : dotted.substr(dot + 1);
}

std::optional<ComponentKind> KindFromFrameworkBase(std::string_view descriptor) {
  const std::string name = SimpleName(descriptor);
  if (name.ends_with("BroadcastReceiver")) return ComponentKind::kReceiver;
  if (name.ends_with("ContentProvider")) return ComponentKind::kProvider;
  if (name.ends_with("Activity")) return ComponentKind::kActivity;
  if (name.ends_with("Service")) return ComponentKind::kService;
  return std::nullopt;
}

}  // namespace

std::string EdgeTagNames(std::uint8_t tags) {
  static const std::pair<EdgeTag, const char*> kNames[] = {
      {kEdgeExplicit, "explicit"}, {kEdgeImplicitLifecycle, "implicit_lifecycle"},
      {kEdgeImplicitHandler, "implicit_handler"}, {kEdgeIcc, "icc"}, {kEdgeEntry, "entry"}};
  std::string out;
  for (const auto& [bit, name] : kNames) {
    if ((tags & bit) == 0) continue;
    if (!out.empty()) out += ',';
    out += name;
  }
  return out;
}

IccgGraph::IccgGraph() {
  nodes_.push_back(IccgNode{std::string(kDummyMainSignature), "", false});
  succ_.emplace_back();
  by_signature_.emplace(std::string(kDummyMainSignature), kDummyMain);
}

NodeId IccgGraph::AddNode(const dex::MethodRef& method, bool app_defined) {
  return AddNode(method.Signature(), method.defining_type, app_defined);
}

NodeId IccgGraph::AddNode(std::string signature, std::string defining_type, bool app_defined) {
  if (auto it = by_signature_.find(signature); it != by_signature_.end()) {
    nodes_[it->second].app_defined = nodes_[it->second].app_defined || app_defined;
    return it->second;
  }
  const auto id = static_cast<NodeId>(nodes_.size());
  by_signature_.emplace(signature, id);
  nodes_.push_back(IccgNode{std::move(signature), std::move(defining_type), app_defined});
  succ_.emplace_back();
  return id;
}

bool IccgGraph::AddEdge(NodeId from, NodeId to, EdgeTag tag) {
  if (from == to || to == kDummyMain) return false;
  auto [it, inserted] = tags_.emplace(std::make_pair(from, to), tag);
  if (inserted) {
    succ_.at(from).push_back(to);
  } else {
    it->second |= tag;
  }
  return true;
}

std::optional<NodeId> IccgGraph::Find(std::string_view signature) const {
  auto it = by_signature_.find(std::string(signature));
  if (it == by_signature_.end()) return std::nullopt;
  return it->second;
}

std::size_t IccgGraph::in_degree(NodeId id) const {
  std::size_t n = 0;
  for (const auto& [edge, tags] : tags_) n += edge.second == id;
  return n;
}

std::uint8_t IccgGraph::tags(NodeId from, NodeId to) const {
  auto it = tags_.find({from, to});
  return it == tags_.end() ? 0 : it->second;
}

std::string IccgGraph::ToDot() const {
  auto quote = [](std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out + "\"";
  };
  std::string out = "digraph iccg {\n";
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    out += "  n" + std::to_string(i) + " [label=" + quote(nodes_[i].signature) +
           (nodes_[i].app_defined ? "" : ", style=dashed") + "];\n";
  }
  for (const auto& [edge, tags] : tags_) {
    out += "  n" + std::to_string(edge.first) + " -> n" + std::to_string(edge.second) +
           " [label=" + quote(EdgeTagNames(tags)) + "];\n";
  }
  return out + "}\n";
}

std::string IccgGraph::ToJson() const {
  nlohmann::ordered_json j;
  j["nodes"] = nlohmann::ordered_json::array();
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    j["nodes"].push_back({{"id", i}, {"signature", nodes_[i].signature}, {"app", nodes_[i].app_defined}});
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& [edge, tags] : tags_) {
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    std::string joined = EdgeTagNames(tags);
    std::size_t start = 0;
    while (start <= joined.size()) {
      auto comma = joined.find(',', start);
      names.push_back(joined.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    j["edges"].push_back({{"from", edge.first}, {"to", edge.second}, {"tags", names}});
  }
  return j.dump(2) + "\n";
}

const std::vector<std::string>& LifecycleMethodNames(ComponentKind kind) {
  static const std::vector<std::string> kCommon = {
      "onCreate", "onStart", "onResume", "onPause", "onStop",
      "onDestroy", "onStartCommand", "onBind", "onReceive"};
  static const std::vector<std::string> kProvider = [] {
    auto v = kCommon;
    v.insert(v.end(), {"query", "insert", "update", "delete"});
    return v;
  }();
  return kind == ComponentKind::kProvider ? kProvider : kCommon;
}

const std::vector<std::string>& HandlerMethodNames() {
  static const std::vector<std::string> names = {
      "onClick", "onLongClick", "onTouch", "onItemClick",
      "onCheckedChanged", "run", "handleMessage", "onOptionsItemSelected"};
  return names;
}

const std::vector<std::string>& IccSenderNames() {
  static const std::vector<std::string> names = {
      "startActivity", "startActivityForResult", "startService", "bindService", "sendBroadcast"};
  return names;
}

std::string DottedToDescriptor(std::string_view dotted) {
  std::string out = "L";
  for (char c : dotted) out.push_back(c == '.' ? '/' : c);
  return out + ";";
}

std::string DescriptorToDotted(std::string_view descriptor) {
  if (descriptor.size() >= 2 && descriptor.front() == 'L' && descriptor.back() == ';') {
    descriptor = descriptor.substr(1, descriptor.size() - 2);
  }
  std::string out(descriptor);
  std::replace(out.begin(), out.end(), '/', '.');
  return out;
}

IccgGraph BuildIccg(std::span<const dex::DexFile> dexes, const ManifestFacts& manifest) {
  IccgGraph g;
  AppIndex app(dexes);

  // Declared components by descriptor.
  std::map<std::string, ComponentKind> declared;
  for (const auto& c : manifest.components) declared.emplace(DottedToDescriptor(c.name), c.kind);

  auto contains = [](const std::vector<std::string>& list, const std::string& s) {
    return std::find(list.begin(), list.end(), s) != list.end();
  };

  // Deterministic class order: sorted by descriptor.
  std::vector<const dex::ClassDef*> classes;
  for (const auto& [type, cls] : app.classes) classes.push_back(cls);
  std::sort(classes.begin(), classes.end(),
            [](const auto* a, const auto* b) { return a->this_type < b->this_type; });

  for (const auto* cls : classes) {
    for (const auto& m : cls->methods) g.AddNode(m.ref, true);
  }
  auto node_for = [&](const dex::MethodRef& ref) {
    return g.AddNode(ref, app.FindMethod(ref.defining_type, ref.name, ref.descriptor) != nullptr);
  };

  // Lifecycle methods of an app class, for a component kind.
  auto lifecycle_nodes = [&](const dex::ClassDef& cls, ComponentKind kind) {
    std::vector<NodeId> out;
    for (const auto& m : cls.methods) {
      if (contains(LifecycleMethodNames(kind), m.ref.name)) out.push_back(node_for(m.ref));
    }
    return out;
  };

  for (const auto* cls : classes) {
    // explicit invoke edges with class-hierarchy resolution.
    for (const auto& m : cls->methods) {
      if (!m.code) continue;
      const NodeId caller = node_for(m.ref);
      const dex::DexFile* owner = app.owner.at(cls);
      bool sends_icc = false;
      for (const auto& insn : m.code->insns) {
        if (insn.kind != dex::InsnKind::kInvoke) continue;
        const dex::MethodRef& target = owner->method_at(insn.index);
        g.AddEdge(caller, node_for(target), kEdgeExplicit);
        if (contains(IccSenderNames(), target.name)) sends_icc = true;

        const bool dynamic = insn.invoke_style == dex::InvokeStyle::kVirtual ||
                             insn.invoke_style == dex::InvokeStyle::kInterface;
        if (!dynamic) continue;
        // Inherited implementation when the declared type does not define it.
        if (app.FindMethod(target.defining_type, target.name, target.descriptor) == nullptr) {
          const auto chain = app.SuperChain(target.defining_type);
          for (std::size_t k = 1; k < chain.size(); ++k) {
            if (const auto* def = app.FindMethod(chain[k], target.name, target.descriptor)) {
              g.AddEdge(caller, node_for(def->ref), kEdgeExplicit);
              break;
            }
          }
        }
        for (const auto& sub : app.Subtypes(target.defining_type)) {
          if (const auto* over = app.FindMethod(sub, target.name, target.descriptor)) {
            g.AddEdge(caller, node_for(over->ref), kEdgeExplicit);
          }
        }
      }

      // ICC: a single declared component named by a class or string constant.
      if (sends_icc) {
        std::set<std::string> candidates;
        for (const auto& insn : m.code->insns) {
          std::string descriptor;
          if (insn.kind == dex::InsnKind::kConstClass) {
            descriptor = owner->type_at(insn.index);
          } else if (insn.kind == dex::InsnKind::kConstString && owner->string_ok(insn.index)) {
            const std::string& text = owner->string_at(insn.index);
            descriptor = text.starts_with('L') && text.ends_with(';') ? text : DottedToDescriptor(text);
          } else {
            continue;
          }
          if (declared.contains(descriptor)) candidates.insert(descriptor);
        }
        if (candidates.size() == 1) {
          const std::string& target_type = *candidates.begin();
          if (auto it = app.classes.find(target_type); it != app.classes.end()) {
            for (NodeId n : lifecycle_nodes(*it->second, declared.at(target_type))) {
              g.AddEdge(caller, n, kEdgeIcc);
            }
          }
        }
      }
    }

    // lifecycle entry edges for component classes.
    std::optional<ComponentKind> kind;
    for (const auto& t : app.SuperChain(cls->this_type)) {
      if (auto it = declared.find(t); it != declared.end()) {
        kind = it->second;
        break;
      }
    }
    if (!kind) {
      for (const auto& t : app.SuperChain(cls->this_type)) {
        if (!app.classes.contains(t)) kind = KindFromFrameworkBase(t);
      }
    }
    if (kind) {
      for (NodeId n : lifecycle_nodes(*cls, *kind)) {
        g.AddEdge(IccgGraph::kDummyMain, n, static_cast<EdgeTag>(kEdgeEntry | kEdgeImplicitLifecycle));
      }
    }

    // UI and message handlers.
    for (const auto& m : cls->methods) {
      if (contains(HandlerMethodNames(), m.ref.name)) {
        g.AddEdge(IccgGraph::kDummyMain, node_for(m.ref), kEdgeImplicitHandler);
      }
    }
  }
  return g;
}

std::vector<std::uint64_t> CountPathsToTargets(const IccgGraph& graph,
                                               const std::vector<std::vector<NodeId>>& target_sets) {
  const std::size_t n = graph.node_count();
  constexpr std::uint32_t kUnvisited = UINT32_MAX;

  // Iterative Tarjan from the dummy main; only reachable nodes get a component.
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> stack;
  std::uint32_t next_index = 0, comp_count = 0;
  struct Frame {
    NodeId v;
    std::size_t next_child;
  };
  std::vector<Frame> frames{{IccgGraph::kDummyMain, 0}};
  index[IccgGraph::kDummyMain] = low[IccgGraph::kDummyMain] = next_index++;
  stack.push_back(IccgGraph::kDummyMain);
  on_stack[IccgGraph::kDummyMain] = true;
  while (!frames.empty()) {
    Frame& f = frames.back();
    const auto& succ = graph.successors(f.v);
    if (f.next_child < succ.size()) {
      const NodeId w = succ[f.next_child++];
      if (index[w] == kUnvisited) {
        index[w] = low[w] = next_index++;
        stack.push_back(w);
        on_stack[w] = true;
        frames.push_back({w, 0});
      } else if (on_stack[w]) {
        low[f.v] = std::min(low[f.v], index[w]);
      }
      continue;
    }
    const NodeId v = f.v;
    frames.pop_back();
    if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
    if (low[v] == index[v]) {
      NodeId w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = comp_count;
      } while (w != v);
      ++comp_count;
    }
  }

  // Tarjan emits components in reverse topological order; the root's is last.
  std::vector<std::vector<NodeId>> members(comp_count);
  for (NodeId v = 0; v < n; ++v) {
    if (comp[v] != kUnvisited) members[comp[v]].push_back(v);
  }
  std::vector<std::uint64_t> paths(comp_count, 0);
  paths[comp[IccgGraph::kDummyMain]] = 1;
  std::vector<std::uint32_t> seen(comp_count, kUnvisited);
  for (std::uint32_t c = comp_count; c-- > 0;) {
    for (NodeId v : members[c]) {
      for (NodeId w : graph.successors(v)) {
        const std::uint32_t cw = comp[w];
        if (cw == c || seen[cw] == c) continue;  // intra-component or duplicate condensed edge
        seen[cw] = c;
        paths[cw] = SaturatingAdd(paths[cw], paths[c]);
      }
    }
  }

  std::vector<std::uint64_t> counts;
  counts.reserve(target_sets.size());
  for (const auto& targets : target_sets) {
    std::uint64_t total = 0;
    for (NodeId t : targets) {
      if (t < n && comp[t] != kUnvisited) total = SaturatingAdd(total, paths[comp[t]]);
    }
    counts.push_back(total);
  }
  return counts;
}

LibUsageVector CountPaths(const IccgGraph& graph, const SdkCatalog& catalog) {
  std::vector<std::vector<NodeId>> targets(catalog.size());
  for (NodeId v = 1; v < graph.node_count(); ++v) {
    if (auto i = catalog.Match(graph.node(v).defining_type); i >= 0) {
      targets[static_cast<std::size_t>(i)].push_back(v);
    }
  }
  return LibUsageVector{CountPathsToTargets(graph, targets)};
}

}  // namespace bctx
