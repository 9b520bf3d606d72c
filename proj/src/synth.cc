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

#include "bctx/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "bctx/embedder.h"
#include "bctx/error.h"
#include "bctx/fusion.h"
#include "bctx/image.h"
#include "bctx/rng.h"

namespace bctx {
namespace {

constexpr std::size_t kSignatureTokens = 8;
constexpr std::size_t kSharedTokens = 16;

std::size_t Group(ViewSignal s, std::size_t label) {
  switch (s) {
    case ViewSignal::kInformative: return label;
    case ViewSignal::kPairInformative: return label / 2;
    default: return 0;
  }
}

std::size_t GroupCount(ViewSignal s, std::size_t classes) {
  switch (s) {
    case ViewSignal::kInformative: return classes;
    case ViewSignal::kPairInformative: return (classes + 1) / 2;
    default: return 1;
  }
}

std::vector<double> BinVector(ViewSignal s, std::size_t group, const std::vector<std::vector<double>>& prototypes,
                              std::size_t dim, Rng& rng) {
  std::vector<double> v(dim, 0.5);
  if (s == ViewSignal::kConstant) return v;
  for (std::size_t i = 0; i < dim; ++i) {
    v[i] = s == ViewSignal::kNoise ? rng.Uniform() : prototypes[group][i] + 0.1 * rng.Normal();
  }
  return v;
}

Bytes Stream(ViewSignal s, std::size_t group, std::size_t groups, const SynthSpec& spec, Rng& rng) {
  if (s == ViewSignal::kConstant) return Bytes((spec.min_stream + spec.max_stream) / 2, 0x5A);
  const std::size_t len = spec.min_stream + static_cast<std::size_t>(rng.Below(spec.max_stream - spec.min_stream + 1));
  const double center = s == ViewSignal::kNoise ? rng.Uniform(32.0, 224.0)
                                                : (static_cast<double>(group) + 0.5) * 256.0 / static_cast<double>(groups);
  Bytes out(len);
  for (auto& b : out) b = static_cast<std::uint8_t>(std::clamp(std::lround(center + 24.0 * rng.Normal()), 0L, 255L));
  return out;
}

std::vector<std::string> Tokens(ViewSignal s, std::size_t group, Rng& rng) {
  std::vector<std::string> out;
  if (s == ViewSignal::kConstant) return {"perm:synth.CONSTANT"};
  char buf[64];
  for (std::size_t j = 0; j < kSharedTokens; ++j) {
    if (rng.Uniform() < (s == ViewSignal::kNoise ? 0.5 : 0.3)) {
      std::snprintf(buf, sizeof buf, "act:synth.SHARED_%02zu", j);
      out.emplace_back(buf);
    }
  }
  if (s != ViewSignal::kNoise) {
    for (std::size_t j = 0; j < kSignatureTokens; ++j) {
      if (rng.Uniform() < 0.7) {
        std::snprintf(buf, sizeof buf, "perm:synth.G%zu_%02zu", group, j);
        out.emplace_back(buf);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> LibCounts(ViewSignal s, std::size_t group, std::size_t dim, Rng& rng) {
  std::vector<std::uint64_t> out(dim, 5);
  if (s == ViewSignal::kConstant) return out;
  for (std::size_t i = 0; i < dim; ++i) {
    double mean = 3.0;
    if (s != ViewSignal::kNoise) mean = i == group % dim ? 40.0 : 1.5;
    out[i] = static_cast<std::uint64_t>(-mean * std::log(1.0 - rng.Uniform()));
  }
  return out;
}

}  // namespace

SynthCorpus GenerateCorpus(const SynthSpec& spec) {
  if (spec.classes < 2 || spec.per_class == 0 || spec.bin_dim == 0 || spec.lib_dim == 0 ||
      spec.min_stream == 0 || spec.max_stream < spec.min_stream) {
    throw Error(ErrorCode::kBadConfig, "invalid synthetic corpus spec");
  }
  Rng rng(spec.seed);
  const ViewSignal sb = spec.signal[0], sc = spec.signal[1], sl = spec.signal[2];
  const std::size_t bin_groups = GroupCount(sb, spec.classes);
  std::vector<std::vector<double>> prototypes(bin_groups, std::vector<double>(spec.bin_dim));
  for (auto& p : prototypes) {
    for (double& x : p) x = rng.Uniform();
  }
  SynthCorpus corpus;
  char buf[64];
  for (std::size_t c = 0; c < spec.classes; ++c) {
    for (std::size_t i = 0; i < spec.per_class; ++i) {
      FeatureRecord r;
      std::snprintf(buf, sizeof buf, "synth-%02zu-%04zu", c, i);
      r.id = buf;
      std::snprintf(buf, sizeof buf, "class%zu", c);
      r.label = buf;
      r.config_hash = "synthetic";
      if (spec.byte_streams) {
        Bytes stream = Stream(sb, Group(sb, c), bin_groups, spec, rng);
        r.bin = EmbedTextureGrid(BytesToImage(stream));
        corpus.streams.push_back(std::move(stream));
      } else {
        r.bin = BinVector(sb, Group(sb, c), prototypes, spec.bin_dim, rng);
      }
      r.tokens = Tokens(sc, Group(sc, c), rng);
      r.lib = LibCounts(sl, Group(sl, c), spec.lib_dim, rng);
      corpus.records.push_back(std::move(r));
    }
  }
  return corpus;
}

SynthCorpus SeparableCorpus(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  return GenerateCorpus(spec);
}

SynthCorpus SingleViewCorpus(View informative, std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  const auto i = static_cast<std::size_t>(informative);
  spec.signal[i] = ViewSignal::kInformative;
  spec.signal[(i + 1) % 3] = ViewSignal::kNoise;
  spec.signal[(i + 2) % 3] = ViewSignal::kConstant;
  return GenerateCorpus(spec);
}

SynthCorpus MixedSignalCorpus(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.byte_streams = true;
  spec.signal = {ViewSignal::kPairInformative, ViewSignal::kInformative, ViewSignal::kInformative};
  return GenerateCorpus(spec);
}

}  // namespace bctx
