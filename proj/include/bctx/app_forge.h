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
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bctx/apk.h"
#include "bctx/dex_forge.h"
#include "bctx/features.h"
#include "bctx/manifest.h"

namespace bctx {

// Test-fixture description of a whole app: manifest, dex files and extra
// archive entries.
struct AppSpec {
  struct ComponentSpec {
    ComponentKind kind = ComponentKind::kActivity;
    std::string name;
    std::vector<std::string> actions;
  };

  std::string package = "com.example.app";
  std::vector<std::string> permissions;
  std::vector<ComponentSpec> components;
  std::vector<dex::DexSpec> dexes;
  std::vector<std::pair<std::string, Bytes>> extra_entries;
  bool binary_manifest = true;
  ZipWriter::Method method = ZipWriter::Method::kDeflate;
};

std::string ManifestXml(const AppSpec& spec);
Bytes ForgeApk(const AppSpec& spec);

// "Lcom/x/Y;->name(I)V" to a method reference. Throws BadConfig.
dex::MethodRef ParseMethodSignature(std::string_view text);

// JSON app description (see README). Throws BadConfig.
AppSpec ParseAppSpec(std::string_view json_text);

// Writes a small labelled corpus of forged APKs plus corpus.jsonl into dir
// and returns the manifest path. Labels: benign, adware, payfraud.
std::filesystem::path ForgeDemoCorpus(const std::filesystem::path& dir, std::size_t per_class, std::uint64_t seed);

}  // namespace bctx
