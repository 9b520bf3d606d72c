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

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bctx/app_forge.h"
#include "bctx/dex.h"
#include "bctx/error.h"
#include "bctx/iccg.h"
#include "bctx/image.h"
#include "bctx/manifest.h"
#include "bctx/synth.h"

namespace bctx::cli {
namespace {

using Json = nlohmann::ordered_json;

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

[[noreturn]] void BadValue(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kBadConfig, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view value) {
  T v{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || end != value.data() + value.size()) BadValue(key, value);
  return v;
}

std::size_t ParsePositive(std::string_view key, std::string_view value) {
  const auto v = ParseNumber<std::size_t>(key, value);
  if (v == 0) BadValue(key, value);
  return v;
}

bool ParseBool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  BadValue(key, value);
}

std::string ReadText(const std::filesystem::path& path) {
  const Bytes b = ReadFile(path);
  return {b.begin(), b.end()};
}

void WriteText(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  WriteFile(path, text);
}

// Prints machine output to a file when given, otherwise to stdout.
void Emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text << '\n';
  } else {
    WriteText(path, text + "\n");
  }
}

std::vector<FeatureRecord> Select(const std::vector<FeatureRecord>& records, const std::vector<std::string>& ids) {
  std::map<std::string, const FeatureRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::vector<FeatureRecord> out;
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::kBadCorpus, "record '" + id + "' is not in the cache");
    out.push_back(*it->second);
  }
  return out;
}

std::vector<std::size_t> AllIndices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

struct LoadedModel {
  FusionModel model;
  ModelMeta meta;
  Vocabulary vocab;
};

LoadedModel OpenModel(const std::string& path, const RunConfig& cfg, bool allow_mismatch) {
  LoadedModel m;
  m.model = LoadModel(path);
  m.meta = ModelMeta::FromJson(ReadText(MetaPath(path)));
  m.vocab = Vocabulary(m.meta.vocabulary);
  CheckFingerprints(m.model, m.vocab.Fingerprint(), cfg.protocol.catalog_fingerprint, allow_mismatch);
  return m;
}

// Records the model is scored on: its held-out ids, or everything.
std::vector<FeatureRecord> EvalRecords(const std::vector<FeatureRecord>& records, const ModelMeta& meta, bool all) {
  if (all || meta.test_ids.empty()) return records;
  return Select(records, meta.test_ids);
}

std::vector<Example> ExamplesFor(const std::vector<FeatureRecord>& records, const LoadedModel& m) {
  return MakeExamples(records, AllIndices(records.size()), m.vocab, m.model.class_labels, m.model.encoder.has_value());
}

double ScoreAccuracy(const FusionModel& model, const std::vector<Example>& examples) {
  std::vector<FeatureTriple> in;
  std::vector<std::size_t> y;
  for (const auto& e : examples) {
    in.push_back(e.features);
    y.push_back(e.label);
  }
  return Accuracy(y, PredictLabels(model, in));
}

}  // namespace

RunConfig::RunConfig() { protocol.catalog_fingerprint = extract.catalog.Fingerprint(); }

void RunConfig::Set(std::string_view key, std::string_view value) {
  auto& t = protocol.train;
  if (key == "seed") {
    seed = ParseNumber<std::uint64_t>(key, value);
    t.seed = seed;
  } else if (key == "jobs") {
    jobs = ParsePositive(key, value);
  } else if (key == "repeats") {
    repeats = ParsePositive(key, value);
  } else if (key == "importance_metric") {
    if (value == "accuracy") importance_metric = ImportanceMetric::kAccuracy;
    else if (value == "macro_f1") importance_metric = ImportanceMetric::kMacroF1;
    else BadValue(key, value);
  } else if (key == "profile") {
    if (value == "desk") t.hidden_width = 256;
    else if (value == "full") t.hidden_width = TrainConfig::FullProfile().hidden_width;
    else BadValue(key, value);
  } else if (key == "hidden_layers") {
    t.hidden_layers = ParseNumber<std::size_t>(key, value);
  } else if (key == "hidden_width") {
    t.hidden_width = ParsePositive(key, value);
  } else if (key == "d_common") {
    t.d_common = ParsePositive(key, value);
  } else if (key == "batch_size") {
    t.batch_size = ParsePositive(key, value);
  } else if (key == "epochs") {
    t.epochs = ParsePositive(key, value);
  } else if (key == "learning_rate") {
    t.learning_rate = ParseNumber<double>(key, value);
  } else if (key == "beta1") {
    t.beta1 = ParseNumber<double>(key, value);
  } else if (key == "beta2") {
    t.beta2 = ParseNumber<double>(key, value);
  } else if (key == "epsilon") {
    t.epsilon = ParseNumber<double>(key, value);
  } else if (key == "raw_counts") {
    t.raw_counts = ParseBool(key, value);
  } else if (key == "views") {
    ViewMask mask{false, false, false};
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      mask[static_cast<std::size_t>(ParseView(Trim(rest.substr(0, comma))))] = true;
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    t.views = mask;
  } else if (key == "min_df") {
    protocol.min_df = ParsePositive(key, value);
  } else if (key == "test_fraction") {
    protocol.test_fraction = ParseNumber<double>(key, value);
  } else if (key == "backend") {
    if (value == "texture") extract.backend = EmbedderBackend::kTextureGrid;
    else if (value == "dense") extract.backend = EmbedderBackend::kDenseCnn;
    else BadValue(key, value);
  } else if (key == "encoder") {
    if (value == "frozen") t.encoder.reset();
    else if (value == "joint") t.encoder = extract.cnn;
    else BadValue(key, value);
  } else if (key == "cnn_input_side") {
    extract.cnn.input_side = ParsePositive(key, value);
  } else if (key == "cnn_stem_channels") {
    extract.cnn.stem_channels = ParsePositive(key, value);
  } else if (key == "cnn_blocks") {
    extract.cnn.blocks = ParsePositive(key, value);
  } else if (key == "cnn_layers_per_block") {
    extract.cnn.layers_per_block = ParseNumber<std::size_t>(key, value);
  } else if (key == "cnn_growth_rate") {
    extract.cnn.growth_rate = ParsePositive(key, value);
  } else if (key == "cnn_seed") {
    extract.cnn_seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "catalog") {
    extract.catalog = LoadCatalog(std::string(value));
    protocol.catalog_fingerprint = extract.catalog.Fingerprint();
  } else {
    throw Error(ErrorCode::kBadConfig, "unknown config key '" + std::string(key) + "'");
  }
  if (t.encoder) t.encoder = extract.cnn;
}

void RunConfig::ApplyFile(const std::filesystem::path& path) {
  std::istringstream in(ReadText(path));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = Trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kBadConfig, path.string() + ":" + std::to_string(n) + ": expected key = value");
    }
    try {
      Set(Trim(s.substr(0, eq)), Trim(s.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(n) + ": " + e.message());
    }
  }
}

std::string ModelMeta::ToJson() const {
  Json j;
  j["format"] = 1;
  j["seed"] = seed;
  j["test_fraction"] = test_fraction;
  j["vocabulary"] = vocabulary;
  j["train_ids"] = train_ids;
  j["test_ids"] = test_ids;
  return j.dump(2);
}

ModelMeta ModelMeta::FromJson(std::string_view text) {
  try {
    const auto j = Json::parse(text);
    ModelMeta m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.test_fraction = j.at("test_fraction").get<double>();
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    m.train_ids = j.at("train_ids").get<std::vector<std::string>>();
    m.test_ids = j.at("test_ids").get<std::vector<std::string>>();
    return m;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kBadConfig, std::string("model metadata: ") + e.what());
  }
}

std::filesystem::path MetaPath(const std::filesystem::path& model_path) {
  auto p = model_path;
  p += ".meta.json";
  return p;
}

int Run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view Android app classifier: feature extraction, training and evaluation.", "bctx"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--set", overrides, "override one setting, key=value (repeatable)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (default 42)");
  auto* jobs_opt = app.add_option("--jobs", jobs, "parallel extraction workers")->check(CLI::PositiveNumber);
  app.add_flag("-v,--verbose", verbose, "progress on standard error");

  // extract
  std::string manifest, out_dir;
  auto* extract = app.add_subcommand("extract", "extract and cache per-app features");
  extract->add_option("--manifest", manifest, "corpus JSON-lines file")->required();
  extract->add_option("--out", out_dir, "cache directory")->required();

  // render
  std::string apk, png, dot, json_path;
  auto* render = app.add_subcommand("render", "write the bytecode image of an APK as PNG");
  render->add_option("--apk", apk)->required();
  render->add_option("--png", png)->required();

  // graph
  auto* graph = app.add_subcommand("graph", "build the inter-component call graph of an APK");
  graph->add_option("--apk", apk)->required();
  graph->add_option("--dot", dot)->required();
  graph->add_option("--json", json_path, "also write the graph as JSON");

  // train
  std::string cache, model_path, log_path;
  bool train_all = false;
  auto* train = app.add_subcommand("train", "train a fusion model on cached features");
  train->add_option("--cache", cache)->required();
  train->add_option("--model", model_path, "output model file")->required();
  train->add_option("--log", log_path, "training log (JSON lines); default <model>.log.jsonl");
  train->add_flag("--all", train_all, "train on every record instead of the stratified training split");

  // eval
  std::size_t kfold = 0;
  bool split_protocol = false, ablate = false, eval_all = false, allow_mismatch = false;
  std::string report_path;
  auto* eval = app.add_subcommand("eval", "score a model or run an evaluation protocol");
  eval->add_option("--cache", cache)->required();
  eval->add_option("--model", model_path, "model to score on its held-out records");
  eval->add_option("--kfold", kfold, "stratified k-fold cross-validation")->check(CLI::Range(2, 1000));
  eval->add_flag("--split", split_protocol, "run the stratified train/test protocol");
  eval->add_flag("--ablate", ablate, "with --split: also run the bytecode-only variant");
  eval->add_flag("--all", eval_all, "with --model: score every record");
  eval->add_flag("--allow-mismatch", allow_mismatch, "skip the vocabulary/catalog fingerprint check");
  eval->add_option("--report", report_path, "write the JSON report here instead of standard output");

  // importance
  std::string view_name;
  auto* importance = app.add_subcommand("importance", "permutation importance of one view");
  importance->add_option("--model", model_path)->required();
  importance->add_option("--cache", cache)->required();
  importance->add_option("--view", view_name, "bin, cxt, lib or all")->required();
  importance->add_flag("--allow-mismatch", allow_mismatch);
  importance->add_flag("--all", eval_all, "use every record instead of the held-out ones");

  // perturb
  std::string op_name, streams_dir;
  double magnitude = 0.0;
  auto* perturb = app.add_subcommand("perturb", "apply a robustness perturbation to cached features");
  perturb->add_option("--cache", cache)->required();
  perturb->add_option("--op", op_name, "dead_bytes, manifest_flip or view_zero")->required();
  perturb->add_option("--mag", magnitude, "dead_bytes: fraction of dex size; manifest_flip: tokens")->required();
  perturb->add_option("--view", view_name, "view_zero: bin, cxt or lib");
  perturb->add_option("--model", model_path, "report clean vs perturbed accuracy of this model");
  perturb->add_option("--manifest", manifest, "dead_bytes: corpus locating the APKs");
  perturb->add_option("--streams", streams_dir, "dead_bytes: directory of raw <id>.dex streams");
  perturb->add_option("--out", out_dir, "write perturbed records here");
  perturb->add_flag("--allow-mismatch", allow_mismatch);
  perturb->add_flag("--all", eval_all, "perturb every record instead of the held-out ones");

  // forge
  std::string spec_path;
  std::size_t per_class = 10;
  auto* forge = app.add_subcommand("forge", "build an APK from a JSON app description");
  forge->add_option("--spec", spec_path)->required();
  forge->add_option("--out", apk, "output APK")->required();

  auto* forge_corpus = app.add_subcommand("forge-corpus", "write a small labelled corpus of forged APKs");
  forge_corpus->add_option("--out", out_dir)->required();
  forge_corpus->add_option("--per-class", per_class)->check(CLI::PositiveNumber);

  // synth
  std::string kind = "separable";
  auto* synth = app.add_subcommand("synth", "write a synthetic feature cache");
  synth->add_option("--kind", kind, "separable, single-view or mixed")
      ->check(CLI::IsMember({"separable", "single-view", "mixed"}));
  synth->add_option("--view", view_name, "single-view: the informative view");
  synth->add_option("--out", out_dir, "cache directory")->required();

  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(raw.size()), raw.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.ApplyFile(config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::kUsageError, "--set expects key=value, got '" + o + "'");
      cfg.Set(Trim(std::string_view(o).substr(0, eq)), Trim(std::string_view(o).substr(eq + 1)));
    }
    if (*seed_opt) cfg.Set("seed", std::to_string(seed));
    if (*jobs_opt) cfg.jobs = jobs;
    auto log = [&](const std::string& msg) {
      if (verbose) err << msg << '\n';
    };

    if (*extract) {
      const auto corpus = LoadCorpus(manifest);
      log("extracting " + std::to_string(corpus.size()) + " apps with " + std::to_string(cfg.jobs) + " jobs");
      const auto rep = ExtractAll(corpus, cfg.extract, out_dir, cfg.jobs);
      Json j;
      j["cache"] = (std::filesystem::path(out_dir) / cfg.extract.Hash()).string();
      j["extracted"] = rep.extracted;
      j["cached"] = rep.cached;
      j["errors"] = Json::array();
      for (const auto& e : rep.errors) {
        j["errors"].push_back({{"id", e.id}, {"error", e.error}});
        err << "warning: " << e.id << ": " << e.error << '\n';
      }
      out << j.dump(2) << '\n';
      return rep.records.empty() && !corpus.empty() ? kExitData : kExitOk;
    }

    if (*render) {
      const auto bundle = OpenApk(apk);
      RenderPng(BytesToImage(ConcatDexBytes(bundle)), png);
      log("wrote " + png);
      return kExitOk;
    }

    if (*graph) {
      const auto bundle = OpenApk(apk);
      std::vector<dex::DexFile> dexes;
      for (const auto& e : bundle.dex_entries) dexes.push_back(dex::ParseDex(e.bytes));
      const auto g = BuildIccg(dexes, ParseManifest(bundle.manifest_bytes));
      WriteText(dot, g.ToDot());
      if (!json_path.empty()) WriteText(json_path, g.ToJson());
      const auto usage = CountPaths(g, cfg.extract.catalog);
      Json j;
      j["nodes"] = g.node_count();
      j["edges"] = g.edge_count();
      Json lib = Json::object();
      for (std::size_t i = 0; i < usage.counts.size(); ++i) {
        if (usage.counts[i] > 0) lib[cfg.extract.catalog.entries[i].library_id] = usage.counts[i];
      }
      j["library_paths"] = lib;
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (*train) {
      const auto records = LoadCache(cache);
      if (records.empty()) throw Error(ErrorCode::kEmptyDataset, "cache " + cache + " holds no records");
      ModelMeta meta;
      meta.seed = cfg.seed;
      SplitResult r;
      if (train_all) {
        const auto labels = LabelSet(records);
        r.vocab = BuildRecordVocabulary(records, AllIndices(records.size()), cfg.protocol.min_df);
        const auto ex = MakeExamples(records, AllIndices(records.size()), r.vocab, labels,
                                     cfg.protocol.train.encoder.has_value());
        auto tr = Train(cfg.protocol.train, ex, labels, r.vocab.Fingerprint(), cfg.protocol.catalog_fingerprint);
        r.model = std::move(tr.model);
        r.log = std::move(tr.log);
        for (const auto& rec : records) meta.train_ids.push_back(rec.id);
      } else {
        meta.test_fraction = cfg.protocol.test_fraction;
        r = EvaluateSplit(records, cfg.protocol, cfg.seed);
        for (auto i : r.split.train) meta.train_ids.push_back(records[i].id);
        for (auto i : r.split.test) meta.test_ids.push_back(records[i].id);
        std::sort(meta.train_ids.begin(), meta.train_ids.end());
        std::sort(meta.test_ids.begin(), meta.test_ids.end());
      }
      meta.vocabulary = r.vocab.tokens();
      if (std::filesystem::path(model_path).has_parent_path()) {
        std::filesystem::create_directories(std::filesystem::path(model_path).parent_path());
      }
      SaveModel(r.model, model_path);
      WriteText(MetaPath(model_path), meta.ToJson() + "\n");
      std::ostringstream lines;
      WriteTrainingLog(r.log, lines);
      WriteText(log_path.empty() ? model_path + ".log.jsonl" : log_path, lines.str());
      Json j;
      j["model"] = model_path;
      j["train_samples"] = meta.train_ids.size();
      j["test_samples"] = meta.test_ids.size();
      j["final_loss"] = r.log.back().loss;
      j["final_train_accuracy"] = r.log.back().accuracy;
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (*eval) {
      const auto records = LoadCache(cache);
      if (kfold > 0) {
        const auto cv = CrossValidate(records, kfold, cfg.protocol, cfg.seed);
        Emit(cv.ToJson(), report_path, out);
        err << "macro F1 over " << kfold << " folds: " << cv.mean_macro_f1 << " +/- " << cv.std_macro_f1 << '\n';
        return kExitOk;
      }
      if (split_protocol) {
        const auto fused = EvaluateSplit(records, cfg.protocol, cfg.seed);
        Json j = Json::parse(fused.report.ToJson());
        err << fused.report.ToTable();
        if (ablate) {
          const auto bc = AblateBytecodeOnly(records, cfg.protocol, cfg.seed);
          err << bc.report.ToTable();
          Json both;
          both["fused"] = j;
          both["bytecode_only"] = Json::parse(bc.report.ToJson());
          j = both;
        }
        Emit(j.dump(2), report_path, out);
        return kExitOk;
      }
      if (model_path.empty()) throw Error(ErrorCode::kUsageError, "eval needs --model, --split or --kfold");
      const auto m = OpenModel(model_path, cfg, allow_mismatch);
      const auto subset = EvalRecords(records, m.meta, eval_all);
      const auto ex = ExamplesFor(subset, m);
      std::vector<FeatureTriple> in;
      std::vector<std::size_t> y;
      for (const auto& e : ex) {
        in.push_back(e.features);
        y.push_back(e.label);
      }
      const Eigen::MatrixXd probs = PredictBatch(m.model, in);
      std::vector<std::size_t> pred;
      for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        Eigen::Index arg = 0;
        probs.col(c).maxCoeff(&arg);
        pred.push_back(static_cast<std::size_t>(arg));
      }
      auto report = ComputeMetrics(m.model.class_labels, y, pred, &probs);
      if (m.model.views == kBytecodeOnlyMask) report.variant = "bytecode-only";
      err << report.ToTable();
      Emit(report.ToJson(), report_path, out);
      return kExitOk;
    }

    if (*importance) {
      const auto records = LoadCache(cache);
      const auto m = OpenModel(model_path, cfg, allow_mismatch);
      const auto ex = ExamplesFor(EvalRecords(records, m.meta, eval_all), m);
      std::vector<View> views;
      if (view_name == "all") {
        views.assign(kAllViews.begin(), kAllViews.end());
      } else {
        views.push_back(ParseView(view_name));
      }
      Json arr = Json::array();
      for (View v : views) {
        if (!m.model.views[static_cast<std::size_t>(v)]) {
          throw Error(ErrorCode::kUsageError, "the model does not use view " + std::string(ViewName(v)));
        }
        const auto imp = PermutationImportance(m.model, ex, v, cfg.repeats, cfg.seed, cfg.importance_metric);
        arr.push_back({{"view", ViewName(v)},
                       {"importance", imp.value},
                       {"baseline", imp.baseline},
                       {"metric", cfg.importance_metric == ImportanceMetric::kAccuracy ? "accuracy" : "macro_f1"},
                       {"repeats", cfg.repeats},
                       {"per_repeat", imp.per_repeat}});
      }
      out << (arr.size() == 1 ? arr[0] : arr).dump(2) << '\n';
      return kExitOk;
    }

    if (*perturb) {
      PerturbSpec spec;
      spec.op = ParsePerturbOp(op_name);
      spec.magnitude = magnitude;
      if (spec.op == PerturbOp::kViewZero) {
        if (view_name.empty()) throw Error(ErrorCode::kUsageError, "view_zero needs --view");
        spec.view = ParseView(view_name);
      }
      const auto records = LoadCache(cache);
      std::optional<LoadedModel> m;
      if (!model_path.empty()) m = OpenModel(model_path, cfg, allow_mismatch);
      const auto subset = m ? EvalRecords(records, m->meta, eval_all) : records;
      Vocabulary vocab = m ? m->vocab : BuildRecordVocabulary(records, AllIndices(records.size()), cfg.protocol.min_df);

      std::map<std::string, std::filesystem::path> apk_paths;
      if (spec.op == PerturbOp::kDeadBytes) {
        if (manifest.empty() == streams_dir.empty()) {
          throw Error(ErrorCode::kUsageError, "dead_bytes needs exactly one of --manifest or --streams");
        }
        if (!manifest.empty()) {
          for (const auto& e : LoadCorpus(manifest)) apk_paths[e.id] = e.path;
        }
      }
      std::vector<FeatureRecord> perturbed;
      for (const auto& rec : subset) {
        PerturbContext ctx;
        ctx.vocab = &vocab;
        ctx.extract = &cfg.extract;
        Bytes stream;
        if (spec.op == PerturbOp::kDeadBytes) {
          if (!streams_dir.empty()) {
            stream = ReadFile(std::filesystem::path(streams_dir) / (std::filesystem::path(RecordFileName(rec.id)).replace_extension(".dex")));
          } else {
            const auto it = apk_paths.find(rec.id);
            if (it == apk_paths.end()) throw Error(ErrorCode::kBadCorpus, "no APK for record " + rec.id);
            stream = ConcatDexBytes(OpenApk(it->second));
          }
          ctx.dex_stream = ByteView(stream);
        }
        perturbed.push_back(PerturbRecord(rec, spec, ctx, cfg.seed));
        if (!out_dir.empty()) SaveRecord(perturbed.back(), std::filesystem::path(out_dir) / RecordFileName(rec.id));
      }
      Json j;
      j["op"] = PerturbOpName(spec.op);
      j["magnitude"] = magnitude;
      j["samples"] = perturbed.size();
      if (m) {
        const double clean = ScoreAccuracy(m->model, ExamplesFor(subset, *m));
        const double dirty = ScoreAccuracy(m->model, ExamplesFor(perturbed, *m));
        j["clean_accuracy"] = clean;
        j["perturbed_accuracy"] = dirty;
        j["drop"] = clean - dirty;
      }
      out << j.dump(2) << '\n';
      return kExitOk;
    }

    if (*forge) {
      const auto spec = ParseAppSpec(ReadText(spec_path));
      const Bytes bytes = ForgeApk(spec);
      if (std::filesystem::path(apk).has_parent_path()) {
        std::filesystem::create_directories(std::filesystem::path(apk).parent_path());
      }
      WriteFile(apk, bytes);
      log("wrote " + apk + " (" + std::to_string(bytes.size()) + " bytes)");
      return kExitOk;
    }

    if (*forge_corpus) {
      out << ForgeDemoCorpus(out_dir, per_class, cfg.seed).string() << '\n';
      return kExitOk;
    }

    if (*synth) {
      SynthCorpus corpus;
      if (kind == "separable") {
        corpus = SeparableCorpus(cfg.seed);
      } else if (kind == "single-view") {
        corpus = SingleViewCorpus(ParseView(view_name.empty() ? "bin" : view_name), cfg.seed);
      } else {
        corpus = MixedSignalCorpus(cfg.seed);
      }
      const std::filesystem::path dir(out_dir);
      for (std::size_t i = 0; i < corpus.records.size(); ++i) {
        SaveRecord(corpus.records[i], dir / RecordFileName(corpus.records[i].id));
        if (!corpus.streams.empty()) {
          std::filesystem::create_directories(dir / "streams");
          WriteFile(dir / "streams" / std::filesystem::path(RecordFileName(corpus.records[i].id)).replace_extension(".dex"), corpus.streams[i]);
        }
      }
      out << corpus.records.size() << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kUsageError || e.code() == ErrorCode::kBadConfig ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace bctx::cli
