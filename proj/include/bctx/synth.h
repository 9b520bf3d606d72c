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

#include <array>
#include <cstdint>
#include <vector>

#include "bctx/bytes.h"
#include "bctx/features.h"
#include "bctx/fusion.h"

namespace bctx {

// How much class information a generated view carries.
enum class ViewSignal {
  kInformative,      // separates every class
  kPairInformative,  // separates class pairs {0,1}, {2,3}, ... only
  kNoise,            // random, independent of the class
  kConstant,         // identical for every sample
};

struct SynthSpec {
  std::size_t classes = 4;
  std::size_t per_class = 100;
  std::array<ViewSignal, 3> signal{ViewSignal::kInformative, ViewSignal::kInformative, ViewSignal::kInformative};
  std::size_t bin_dim = 32;  // vector mode only
  std::size_t lib_dim = 8;
  // Derive f_bin from a generated byte stream through the real imaging and
  // texture-grid path instead of sampling it directly.
  bool byte_streams = false;
  std::size_t min_stream = 15000;
  std::size_t max_stream = 45000;
  std::uint64_t seed = 42;
};

struct SynthCorpus {
  std::vector<FeatureRecord> records;
  std::vector<Bytes> streams;  // parallel to records when byte_streams is set
};

SynthCorpus GenerateCorpus(const SynthSpec& spec);

// Every view separates the four classes.
SynthCorpus SeparableCorpus(std::uint64_t seed);
// Only `informative` carries class signal; the next view in bin/cxt/lib
// order is noise and the remaining one is constant.
SynthCorpus SingleViewCorpus(View informative, std::uint64_t seed);
// Byte streams separate class pairs only; the context and library views
// separate every class.
SynthCorpus MixedSignalCorpus(std::uint64_t seed);

}  // namespace bctx
