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

#include "bctx/features.h"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bctx/dex.h"
#include "bctx/digest.h"
#include "bctx/error.h"
#include "bctx/iccg.h"
#include "bctx/image.h"
#include "bctx/manifest.h"
#include "bctx/netconst.h"

namespace bctx {
namespace {

constexpr char kRecordMagic[] = "BCTX1";
constexpr std::size_t kRecordMagicLen = sizeof(kRecordMagic) - 1;

void WriteString(ByteWriter& w, std::string_view s) {
  w.U32(static_cast<std::uint32_t>(s.size()));
  w.Append(s);
}

std::string ReadString(ByteReader& r) {
  const auto b = r.Take(r.U32());
  return {b.begin(), b.end()};
}

std::string FileStem(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out != id || out.empty() || out.front() == '.') out += "-" + Sha256Hex(id).substr(0, 8);
  return out;
}

}  // namespace

std::string ExtractConfig::Hash() const {
  std::ostringstream s;
  s << "v" << version << "|backend=" << (backend == EmbedderBackend::kTextureGrid ? "texture" : "dense");
  if (backend == EmbedderBackend::kDenseCnn) {
    s << "|cnn=" << cnn.input_side << "," << cnn.stem_channels << "," << cnn.blocks << "," << cnn.layers_per_block
      << "," << cnn.growth_rate << "|seed=" << cnn_seed;
  }
  s << "|catalog=" << catalog.Fingerprint();
  return Sha256Hex(s.str()).substr(0, 16);
}

std::vector<double> EmbedImage(const BytecodeImage& image, const ExtractConfig& config) {
  if (config.backend == EmbedderBackend::kTextureGrid) return EmbedTextureGrid(image);
  return EmbedDenseCnn(image, DenseCnnParams::Init(config.cnn, config.cnn_seed));
}

FeatureRecord ExtractFeatures(const ApkBundle& bundle, const ExtractConfig& config) {
  FeatureRecord rec;
  rec.version = config.version;
  rec.config_hash = config.Hash();

  const BytecodeImage image = BytesToImage(ConcatDexBytes(bundle));
  rec.bin = EmbedImage(image, config);
  if (config.backend == EmbedderBackend::kDenseCnn) {
    rec.image_side = config.cnn.input_side;
    rec.image = BoxDownsample(image.data, kImageSide, rec.image_side, kImageChannels);
  }

  std::vector<dex::DexFile> dexes;
  dexes.reserve(bundle.dex_entries.size());
  for (const auto& e : bundle.dex_entries) dexes.push_back(dex::ParseDex(e.bytes));

  const ManifestFacts facts = ParseManifest(bundle.manifest_bytes);
  std::vector<NetConstant> net;
  for (const auto& d : dexes) {
    auto found = ScanDexConstants(d);
    net.insert(net.end(), found.begin(), found.end());
  }
  auto res = ScanResources(bundle);
  net.insert(net.end(), res.begin(), res.end());
  rec.tokens = ContextTokens(facts, net);

  const IccgGraph graph = BuildIccg(dexes, facts);
  rec.lib = CountPaths(graph, config.catalog).counts;
  return rec;
}

Bytes SerializeRecord(const FeatureRecord& r) {
  ByteWriter w;
  w.Append(std::string_view(kRecordMagic));
  w.U32(r.version);
  WriteString(w, r.id);
  WriteString(w, r.label);
  WriteString(w, r.config_hash);
  WriteString(w, r.content_hash);
  // Dimension table.
  w.U64(r.bin.size());
  w.U64(r.tokens.size());
  w.U64(r.lib.size());
  w.U64(r.image_side);
  for (double v : r.bin) w.F64(v);
  for (const auto& t : r.tokens) WriteString(w, t);
  for (auto c : r.lib) w.F64(static_cast<double>(c));
  w.Append(r.image);
  return w.Release();
}

FeatureRecord DeserializeRecord(ByteView data) {
  if (data.size() < kRecordMagicLen || !std::equal(data.begin(), data.begin() + kRecordMagicLen, kRecordMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a BCTX1 feature record");
  }
  ByteReader rd(data);
  rd.Skip(kRecordMagicLen);
  FeatureRecord r;
  r.version = rd.U32();
  r.id = ReadString(rd);
  r.label = ReadString(rd);
  r.config_hash = ReadString(rd);
  r.content_hash = ReadString(rd);
  const std::uint64_t nbin = rd.U64(), ntok = rd.U64(), nlib = rd.U64(), side = rd.U64();
  if (nbin > rd.remaining() / 8 || ntok > rd.remaining() / 4 || nlib > rd.remaining() / 8 || side > 4096) {
    throw Error(ErrorCode::kTruncatedSection, "feature record dimension table exceeds file");
  }
  r.bin.resize(nbin);
  for (double& v : r.bin) v = ReadF64(rd);
  r.tokens.resize(ntok);
  for (auto& t : r.tokens) t = ReadString(rd);
  r.lib.resize(nlib);
  for (auto& c : r.lib) c = static_cast<std::uint64_t>(ReadF64(rd));
  r.image_side = side;
  const auto img = rd.Take(side * side * kImageChannels);
  r.image.assign(img.begin(), img.end());
  if (rd.remaining() != 0) throw Error(ErrorCode::kTruncatedSection, "trailing bytes after feature record");
  return r;
}

void SaveRecord(const FeatureRecord& record, const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  // Write-then-rename so readers never see partial files.
  auto tmp = path;
  tmp += ".tmp";
  WriteFile(tmp, SerializeRecord(record));
  std::filesystem::rename(tmp, path);
}

FeatureRecord LoadRecord(const std::filesystem::path& path) { return DeserializeRecord(ReadFile(path)); }

std::vector<CorpusEntry> ParseCorpus(std::string_view text, const std::filesystem::path& base_dir) {
  std::vector<CorpusEntry> out;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "corpus line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kBadCorpus, where + e.what());
    }
    CorpusEntry e;
    for (const char* key : {"id", "path", "label"}) {
      if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
        throw Error(ErrorCode::kBadCorpus, where + "missing string field '" + key + "'");
      }
    }
    e.id = j["id"].get<std::string>();
    e.label = j["label"].get<std::string>();
    e.path = j["path"].get<std::string>();
    if (e.id.empty() || e.label.empty()) throw Error(ErrorCode::kBadCorpus, where + "empty id or label");
    if (!ids.insert(e.id).second) throw Error(ErrorCode::kBadCorpus, where + "duplicate id '" + e.id + "'");
    if (e.path.is_relative()) e.path = base_dir / e.path;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CorpusEntry> LoadCorpus(const std::filesystem::path& manifest) {
  const Bytes raw = ReadFile(manifest);
  auto corpus = ParseCorpus(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()),
                            manifest.parent_path());
  for (const auto& e : corpus) {
    if (!std::filesystem::exists(e.path)) {
      throw Error(ErrorCode::kBadCorpus, "corpus entry '" + e.id + "': missing file " + e.path.string());
    }
  }
  return corpus;
}

std::string RecordFileName(std::string_view id) { return FileStem(id) + ".bctx"; }

std::filesystem::path RecordPath(const std::filesystem::path& cache_dir, const ExtractConfig& config,
                                 std::string_view id) {
  return cache_dir / config.Hash() / RecordFileName(id);
}

ExtractReport ExtractAll(const std::vector<CorpusEntry>& corpus, const ExtractConfig& config,
                         const std::filesystem::path& cache_dir, std::size_t jobs) {
  struct Outcome {
    std::optional<FeatureRecord> record;
    bool cached = false;
    std::string error;
  };
  std::vector<Outcome> outcomes(corpus.size());
  const std::string config_hash = config.Hash();

  auto work = [&](std::size_t i) {
    const CorpusEntry& entry = corpus[i];
    Outcome& out = outcomes[i];
    try {
      const Bytes apk = ReadFile(entry.path);
      const std::string content_hash = Sha256Hex(apk);
      const auto path = RecordPath(cache_dir, config, entry.id);
      if (std::filesystem::exists(path)) {
        try {
          FeatureRecord cached = LoadRecord(path);
          if (cached.version == config.version && cached.content_hash == content_hash &&
              cached.config_hash == config_hash && cached.id == entry.id) {
            if (cached.label != entry.label) {
              cached.label = entry.label;
              SaveRecord(cached, path);
            }
            out.record = std::move(cached);
            out.cached = true;
            return;
          }
        } catch (const Error&) {
          // Unreadable cache entries are rebuilt.
        }
      }
      FeatureRecord rec = ExtractFeatures(OpenApkBytes(apk, entry.path), config);
      rec.id = entry.id;
      rec.label = entry.label;
      rec.content_hash = content_hash;
      SaveRecord(rec, path);
      out.record = std::move(rec);
    } catch (const Error& e) {
      out.error = e.what();
    } catch (const std::exception& e) {
      out.error = std::string("IoError: ") + e.what();
    }
  };

  jobs = std::max<std::size_t>(1, std::min(jobs, corpus.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < corpus.size(); i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  ExtractReport report;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    Outcome& o = outcomes[i];
    if (o.record) {
      (o.cached ? report.cached : report.extracted) += 1;
      report.records.push_back(std::move(*o.record));
    } else {
      report.errors.push_back({corpus[i].id, o.error});
    }
  }
  std::sort(report.records.begin(), report.records.end(),
            [](const FeatureRecord& a, const FeatureRecord& b) { return a.id < b.id; });
  return report;
}

std::vector<FeatureRecord> LoadCache(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  std::vector<FeatureRecord> out;
  std::set<std::string> hashes;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".bctx") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    out.push_back(LoadRecord(f));
    hashes.insert(out.back().config_hash);
  }
  if (hashes.size() > 1) {
    throw Error(ErrorCode::kBadConfig, "cache " + dir.string() +
                                           " mixes several extraction configs; point at one subdirectory");
  }
  std::sort(out.begin(), out.end(), [](const FeatureRecord& a, const FeatureRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].id == out[i - 1].id) throw Error(ErrorCode::kBadCorpus, "duplicate record id " + out[i].id);
  }
  return out;
}

}  // namespace bctx
