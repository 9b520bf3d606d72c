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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bctx/features.h"
#include "bctx/protocol.h"

namespace bctx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Settings shared by the subcommands. Built-in defaults, then the config
// file, then command-line flags.
struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  std::size_t repeats = 10;
  ImportanceMetric importance_metric = ImportanceMetric::kAccuracy;
  ProtocolConfig protocol;
  ExtractConfig extract;

  RunConfig();
  // One "key = value" setting; throws BadConfig for unknown keys or values.
  void Set(std::string_view key, std::string_view value);
  // Applies a file of key = value lines ('#' starts a comment).
  void ApplyFile(const std::filesystem::path& path);
};

// Sidecar written next to a model: vocabulary and the split it was trained on.
struct ModelMeta {
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
  std::vector<std::string> vocabulary;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;

  std::string ToJson() const;
  static ModelMeta FromJson(std::string_view text);
};
std::filesystem::path MetaPath(const std::filesystem::path& model_path);

// Entry point; argv[0] is the program name.
int Run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace bctx::cli
