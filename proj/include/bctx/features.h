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
#include <optional>
#include <string>
#include <vector>

#include "bctx/apk.h"
#include "bctx/bytes.h"
#include "bctx/catalog.h"
#include "bctx/embedder.h"

namespace bctx {

inline constexpr std::uint32_t kExtractionVersion = 1;

enum class EmbedderBackend { kTextureGrid, kDenseCnn };

struct ExtractConfig {
  std::uint32_t version = kExtractionVersion;
  EmbedderBackend backend = EmbedderBackend::kTextureGrid;
  DenseCnnConfig cnn;
  std::uint64_t cnn_seed = 42;  // fixed random encoder used for the bin view
  SdkCatalog catalog = DefaultCatalog();

  // Short content hash naming the cache subdirectory.
  std::string Hash() const;
};

// Everything the classifier needs from one app. The context view is kept as
// raw tokens; bits are produced against a split-specific vocabulary.
struct FeatureRecord {
  std::string id;
  std::string label;
  std::uint32_t version = kExtractionVersion;
  std::string config_hash;
  std::string content_hash;  // SHA-256 of the APK bytes
  std::vector<double> bin;
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> lib;
  // Downsampled encoder input (side*side*3 bytes, row-major RGB); only for
  // the dense CNN backend.
  std::vector<std::uint8_t> image;
  std::size_t image_side = 0;

  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

// Feature views of one opened APK. id/label/content_hash are left empty.
FeatureRecord ExtractFeatures(const ApkBundle& bundle, const ExtractConfig& config);
std::vector<double> EmbedImage(const BytecodeImage& image, const ExtractConfig& config);

Bytes SerializeRecord(const FeatureRecord& record);
FeatureRecord DeserializeRecord(ByteView data);
void SaveRecord(const FeatureRecord& record, const std::filesystem::path& path);
FeatureRecord LoadRecord(const std::filesystem::path& path);

struct CorpusEntry {
  std::string id;
  std::filesystem::path path;
  std::string label;
};

// JSON lines {"id": ..., "path": ..., "label": ...}; relative paths resolve
// against the manifest's directory. Throws BadCorpus.
std::vector<CorpusEntry> LoadCorpus(const std::filesystem::path& manifest);
std::vector<CorpusEntry> ParseCorpus(std::string_view text, const std::filesystem::path& base_dir);

struct ExtractReport {
  std::size_t extracted = 0;
  std::size_t cached = 0;
  struct Failure {
    std::string id;
    std::string error;
  };
  std::vector<Failure> errors;
  std::vector<FeatureRecord> records;  // successful ones, by id
};

// File name of a record inside a cache directory.
std::string RecordFileName(std::string_view id);
std::filesystem::path RecordPath(const std::filesystem::path& cache_dir, const ExtractConfig& config,
                                 std::string_view id);

// Extracts every entry into cache_dir/<config hash>/<id>.bctx, skipping
// entries whose cached record has the same version and content hash.
// Per-app failures are collected, not thrown.
ExtractReport ExtractAll(const std::vector<CorpusEntry>& corpus, const ExtractConfig& config,
                         const std::filesystem::path& cache_dir, std::size_t jobs = 1);

// Loads every record in a cache directory (or one config subdirectory), by id.
std::vector<FeatureRecord> LoadCache(const std::filesystem::path& dir);

}  // namespace bctx
