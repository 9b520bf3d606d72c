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

// Independent reference implementations used as test oracles.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bctx/bytes.h"
#include "bctx/dex_forge.h"
#include "bctx/fusion.h"
#include "bctx/iccg.h"
#include "bctx/rng.h"

namespace bctx::oracle {

// Code of the bctx::Error thrown by f, or nullopt when nothing is thrown.
inline std::optional<ErrorCode> ThrownCode(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// MUTF-8 to UTF-8 through an explicit UTF-16 code-unit stage.
std::optional<std::string> Mutf8ToUtf8(ByteView data);

// Random forge description exercising every instruction form.
dex::DexSpec RandomDexSpec(Rng& rng);
// Order-insensitive view of the observable content: classes by type,
// methods by (direct first, name, descriptor); pool strings dropped.
dex::DexSpec Canonical(dex::DexSpec spec);
// Empty when equal, otherwise a description of the first difference.
std::string CompareObservable(const dex::DexSpec& forged, const dex::DexSpec& described);

struct DecodedPng {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;
};
// libpng decode of an in-memory PNG.
DecodedPng DecodePng(ByteView png);

// Reference box-filter resampling by explicit membership tests, mean
// rounded half-up.
std::vector<std::uint8_t> BoxDownsample(const std::vector<std::uint8_t>& src, std::size_t src_side,
                                        std::size_t dst_side, std::size_t channels);

using Adjacency = std::vector<std::vector<NodeId>>;
// Node 0 is the root; no self-loops or edges into the root.
Adjacency RandomDag(Rng& rng, std::size_t nodes, double edge_prob);
Adjacency RandomGraph(Rng& rng, std::size_t nodes, double edge_prob);
IccgGraph GraphFrom(const Adjacency& adj);
// Number of distinct simple paths root -> target by exhaustive DFS.
std::uint64_t BruteForcePaths(const Adjacency& adj, NodeId root, NodeId target);
// Strongly connected components from the transitive closure (mutual
// reachability), then exhaustive path enumeration over the condensation.
std::uint64_t CondensationPaths(const Adjacency& adj, NodeId root, NodeId target);

// Per-sample forward pass written with explicit loops.
std::vector<double> StraightLineForward(const FusionModel& model, const FeatureTriple& input);

// Population mean and standard deviation of one 30x30 cell channel, in
// long double, values scaled to [0, 1].
std::pair<double, double> CellStats(const std::vector<std::uint8_t>& image, std::size_t cell_x, std::size_t cell_y,
                                    std::size_t channel);

}  // namespace bctx::oracle
