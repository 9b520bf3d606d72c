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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cstring>
#include <numeric>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bctx/app_forge.h"
#include "bctx/iccg.h"
#include "bctx/image.h"
#include "bctx/protocol.h"
#include "bctx/synth.h"
#include "cli.h"
#include "oracles.h"

namespace bctx {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// 1. Forged DEX files parse back to the same observable content.
Outcome DexRoundTrip() {
  const auto start = Clock::now();
  Rng rng(1);
  std::size_t ok = 0;
  std::string first_failure;
  for (int i = 0; i < 100; ++i) {
    const dex::DexSpec spec = oracle::RandomDexSpec(rng);
    try {
      const dex::DexFile parsed = dex::ParseDex(dex::ForgeDex(spec));
      const std::string diff = oracle::CompareObservable(spec, dex::DescribeDex(parsed));
      if (diff.empty() && parsed.checksum_ok() && parsed.signature_ok()) {
        ++ok;
      } else if (first_failure.empty()) {
        first_failure = diff.empty() ? "bad checksum" : diff;
      }
    } catch (const std::exception& e) {
      if (first_failure.empty()) first_failure = e.what();
    }
  }
  const double t = Seconds(start);
  return {ok == 100 && t < 10.0, Fmt("%zu/100 round-trips in %.2fs%s%s", ok, t, first_failure.empty() ? "" : "; ",
                                     first_failure.c_str())};
}

// 2. Bytes map to pixels unchanged.
Outcome BytePreservation() {
  const Bytes magic = {'d', 'e', 'x', '\n', '0', '3', '5', 0};
  const BytecodeImage head = BytesToImage(magic);
  const bool magic_ok = head.at(0, 0, 0) == 100 && head.at(0, 0, 1) == 101 && head.at(0, 0, 2) == 120 &&
                        head.at(1, 0, 0) == 10 && head.at(1, 0, 1) == 48 && head.at(1, 0, 2) == 51;
  Rng rng(2);
  std::size_t ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Bytes data(1 + rng.Below(trial < 900 ? 30000 : 270000));
    for (auto& b : data) b = static_cast<std::uint8_t>(rng.Below(256));
    const BytecodeImage image = BytesToImage(data);
    const std::size_t side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>((data.size() + 2) / 3))));
    bool good = image.data.size() == 270000;
    for (std::size_t i = 0; good && i < data.size(); ++i) {
      const std::size_t pixel = i / 3;
      good = image.at(pixel % side, pixel / side, i % 3) == data[i];
    }
    // Everything beyond the data is zero padding.
    for (std::size_t i = data.size(); good && i < side * side * 3; ++i) {
      const std::size_t pixel = i / 3;
      good = image.at(pixel % side, pixel / side, i % 3) == 0;
    }
    for (std::size_t y = 0; good && y < 300; ++y) {
      for (std::size_t x = (y < side ? side : 0); good && x < 300; ++x) good = image.at(x, y, 0) == 0;
    }
    ok += good;
  }
  return {magic_ok && ok == 1000,
          Fmt("magic pixels %s, %zu/1000 random streams preserved", magic_ok ? "match" : "DIFFER", ok)};
}

// 3. Path counts agree with exhaustive enumeration.
Outcome PathCounts() {
  Rng rng(3);
  std::size_t dag_ok = 0, cyc_ok = 0;
  auto check = [](const oracle::Adjacency& adj, bool cyclic) {
    const IccgGraph g = oracle::GraphFrom(adj);
    std::vector<std::vector<NodeId>> targets;
    for (NodeId t = 1; t < adj.size(); ++t) targets.push_back({t});
    const auto counts = CountPathsToTargets(g, targets);
    for (NodeId t = 1; t < adj.size(); ++t) {
      const auto expect = cyclic ? oracle::CondensationPaths(adj, 0, t) : oracle::BruteForcePaths(adj, 0, t);
      if (counts[t - 1] != expect) return false;
    }
    return true;
  };
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng.Below(11);
    dag_ok += check(oracle::RandomDag(rng, n, rng.Uniform(0.1, 0.8)), false);
  }
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng.Below(11);
    cyc_ok += check(oracle::RandomGraph(rng, n, rng.Uniform(0.05, 0.4)), true);
  }
  return {dag_ok == 200 && cyc_ok == 100, Fmt("%zu/200 DAGs, %zu/100 cyclic graphs exact", dag_ok, cyc_ok)};
}

// Largest relative gap between analytic and central-difference gradients
// over a strided subset of each parameter block.
double GradientGap(std::vector<std::span<double>> params, std::vector<std::span<const double>> grads,
                   std::size_t first_block, const std::function<double()>& objective, double h) {
  double worst = 0;
  for (std::size_t b = first_block; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); i += 1 + params[b].size() / 12) {
      const double saved = params[b][i];
      params[b][i] = saved + h;
      const double up = objective();
      params[b][i] = saved - h;
      const double down = objective();
      params[b][i] = saved;
      const double numeric = (up - down) / (2 * h);
      worst = std::max(worst, std::abs(numeric - grads[b][i]) / std::max(1.0, std::abs(numeric)));
    }
  }
  return worst;
}

// 4. Reverse-mode gradients against finite differences.
Outcome Gradients() {
  const auto start = Clock::now();
  Rng rng(4);
  TrainConfig c;
  c.hidden_layers = 3;
  c.hidden_width = 12;
  c.d_common = 6;
  std::vector<Example> batch;
  for (std::size_t i = 0; i < 8; ++i) {
    Example e;
    e.id = std::to_string(i);
    e.label = i % 3;
    for (int d = 0; d < 10; ++d) e.features.bin.push_back(rng.Uniform(-1, 1));
    for (int d = 0; d < 7; ++d) e.features.cxt.push_back(static_cast<double>(rng.Below(2)));
    for (int d = 0; d < 5; ++d) e.features.lib.push_back(static_cast<double>(rng.Below(9)));
    Tensor3 t(3, 16, 16);
    for (auto& v : t.data) v = rng.Uniform();
    e.features.image = t;
    batch.push_back(std::move(e));
  }
  FusionModel mlp = FusionModel::Init({10, 7, 5}, c, {"a", "b", "c"});
  const auto mlp_grads = ComputeLossAndGrads(mlp, batch).grads;
  const double mlp_gap = GradientGap(mlp.Blocks(), mlp_grads.Blocks(), 0,
                                     [&] { return ComputeLossAndGrads(mlp, batch).loss; }, 1e-6);

  TrainConfig joint = c;
  joint.encoder = DenseCnnConfig{16, 4, 2, 2, 3};
  FusionModel with_cnn = FusionModel::Init({10, 7, 5}, joint, {"a", "b", "c"});
  for (auto& b : with_cnn.encoder->stem.bias) b = rng.Uniform(-0.1, 0.1);
  const auto cnn_grads = ComputeLossAndGrads(with_cnn, batch).grads;
  const std::size_t first_encoder_block = with_cnn.Blocks().size() - with_cnn.encoder->Blocks().size();
  const double cnn_gap = GradientGap(with_cnn.Blocks(), cnn_grads.Blocks(), first_encoder_block,
                                     [&] { return ComputeLossAndGrads(with_cnn, batch).loss; }, 1e-5);
  const double t = Seconds(start);
  return {mlp_gap < 1e-4 && cnn_gap < 1e-3 && t < 60.0,
          Fmt("MLP max rel err %.2e, CNN max rel err %.2e, %.1fs", mlp_gap, cnn_gap, t)};
}

// 5. Separable synthetic corpus.
Outcome Separable() {
  const auto start = Clock::now();
  const auto corpus = SeparableCorpus(42);
  const auto r = EvaluateSplit(corpus.records, ProtocolConfig{}, 42);
  const double t = Seconds(start);
  return {r.report.macro_f1 >= 0.95 && t < 120.0, Fmt("macro F1 %.4f in %.1fs", r.report.macro_f1, t)};
}

// 6. Permutation importance singles out the informative view.
Outcome ImportanceAttribution() {
  bool pass = true;
  std::string detail;
  for (View informative : kAllViews) {
    const auto corpus = SingleViewCorpus(informative, 42);
    const auto r = EvaluateSplit(corpus.records, ProtocolConfig{}, 42);
    std::array<double, 3> imp{};
    for (View v : kAllViews) {
      imp[static_cast<std::size_t>(v)] = PermutationImportance(r.model, r.test_examples, v, 10, 7).value;
    }
    const std::size_t i = static_cast<std::size_t>(informative);
    const std::size_t constant = (i + 2) % 3;
    bool ok = imp[i] > 0 && std::abs(imp[constant]) <= 1e-9;
    for (std::size_t j = 0; j < 3; ++j) {
      if (j != i) ok = ok && imp[i] > 5.0 * std::max(imp[j], 0.0);
    }
    pass = pass && ok;
    detail += Fmt("%s%s: bin=%.4f cxt=%.4f lib=%.4f", detail.empty() ? "" : "; ",
                  std::string(ViewName(informative)).c_str(), imp[0], imp[1], imp[2]);
  }
  return {pass, detail};
}

struct MixedRun {
  SynthCorpus corpus = MixedSignalCorpus(42);
  SplitResult fused, bytecode;
};

MixedRun& Mixed() {
  static MixedRun run = [] {
    MixedRun m;
    m.fused = EvaluateSplit(m.corpus.records, ProtocolConfig{}, 42);
    m.bytecode = AblateBytecodeOnly(m.corpus.records, ProtocolConfig{}, 42);
    return m;
  }();
  return run;
}

// 7. Fusion beats the bytecode-only ablation.
Outcome FusionGain() {
  const auto& m = Mixed();
  const double gain = m.fused.report.macro_f1 - m.bytecode.report.macro_f1;
  return {gain >= 0.10, Fmt("fused %.4f, bytecode-only %.4f, gain %.4f", m.fused.report.macro_f1,
                            m.bytecode.report.macro_f1, gain)};
}

// 8. Robustness to dead-code injection; manifest flips touch only the context view.
Outcome Robustness() {
  auto& m = Mixed();
  const ExtractConfig extract;
  const auto labels = LabelSet(m.corpus.records);
  auto accuracy = [&](const SplitResult& s, bool perturb) {
    std::vector<FeatureRecord> recs;
    for (auto i : s.split.test) {
      if (!perturb) {
        recs.push_back(m.corpus.records[i]);
        continue;
      }
      PerturbContext ctx;
      ctx.extract = &extract;
      ctx.dex_stream = ByteView(m.corpus.streams[i]);
      recs.push_back(PerturbRecord(m.corpus.records[i], {PerturbOp::kDeadBytes, 0.5, View::kBin}, ctx, 99));
    }
    std::vector<std::size_t> idx(recs.size());
    std::iota(idx.begin(), idx.end(), 0);
    const auto ex = MakeExamples(recs, idx, s.vocab, labels, false);
    std::vector<FeatureTriple> in;
    std::vector<std::size_t> y;
    for (const auto& e : ex) {
      in.push_back(e.features);
      y.push_back(e.label);
    }
    return Accuracy(y, PredictLabels(s.model, in));
  };
  const double fused_drop = accuracy(m.fused, false) - accuracy(m.fused, true);
  const double bc_drop = accuracy(m.bytecode, false) - accuracy(m.bytecode, true);

  bool flip_ok = true;
  PerturbContext ctx;
  ctx.vocab = &m.fused.vocab;
  for (const auto& rec : m.corpus.records) {
    const auto out = PerturbRecord(rec, {PerturbOp::kManifestFlip, 5, View::kCxt}, ctx, 99);
    flip_ok = flip_ok && out.bin.size() == rec.bin.size() &&
              std::memcmp(out.bin.data(), rec.bin.data(), rec.bin.size() * sizeof(double)) == 0 && out.lib == rec.lib &&
              out.image == rec.image;
  }
  return {fused_drop <= 0.5 * bc_drop + 1e-12 && flip_ok,
          Fmt("dead_bytes 50%%: fused drop %.4f, bytecode-only drop %.4f; manifest_flip bin/lib %s", fused_drop, bc_drop,
              flip_ok ? "unchanged" : "CHANGED")};
}

// 9. Two independent runs of the command-line pipeline agree byte for byte.
Outcome Reproducibility() {
  const fs::path root = fs::temp_directory_path() / "bctx_acceptance_repro";
  fs::remove_all(root);
  std::vector<Bytes> models;
  std::vector<std::string> reports;
  bool ran = true;
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    const std::string jobs = run == 0 ? "1" : "4";
    const std::vector<std::vector<std::string>> steps = {
        {"bctx", "forge-corpus", "--out", (dir / "corpus").string(), "--per-class", "10"},
        {"bctx", "--jobs", jobs, "extract", "--manifest", (dir / "corpus" / "corpus.jsonl").string(), "--out",
         (dir / "cache").string()},
        {"bctx", "train", "--cache", (dir / "cache").string(), "--model", (dir / "model.bin").string()},
        {"bctx", "eval", "--cache", (dir / "cache").string(), "--model", (dir / "model.bin").string(), "--report",
         (dir / "report.json").string()}};
    for (const auto& argv : steps) {
      std::ostringstream out, err;
      ran = ran && cli::Run(argv, out, err) == cli::kExitOk;
    }
    if (!ran) break;
    models.push_back(ReadFile(dir / "model.bin"));
    const Bytes report = ReadFile(dir / "report.json");
    reports.emplace_back(report.begin(), report.end());
  }
  fs::remove_all(root);
  const bool same = ran && models[0] == models[1] && reports[0] == reports[1];
  return {same, ran ? Fmt("model files %s (%zu bytes), reports %s", models[0] == models[1] ? "identical" : "DIFFER",
                          models[0].size(), reports[0] == reports[1] ? "identical" : "DIFFER")
                    : std::string("pipeline step failed")};
}

// Random app whose call structure (including cycles) is reachable from a
// declared activity.
AppSpec RandomReachableApp(Rng& rng, std::size_t index) {
  const auto& catalog = DefaultCatalog();
  AppSpec app;
  app.package = "com.acc.app" + std::to_string(index);
  app.components = {{ComponentKind::kActivity, ".Main", {}}};
  const std::string pkg = "Lcom/acc/app" + std::to_string(index) + "/";
  const std::size_t helpers = 2 + rng.Below(5);
  std::vector<dex::ForgeClass> classes;
  dex::ForgeClass main{pkg + "Main;", "Landroid/app/Activity;"};
  main.methods.push_back({"onCreate", "(Landroid/os/Bundle;)V"});
  classes.push_back(main);
  for (std::size_t h = 0; h < helpers; ++h) {
    dex::ForgeClass c{pkg + "H" + std::to_string(h) + ";"};
    c.methods.push_back({"step", "()V", dex::kAccPublic | dex::kAccStatic});
    classes.push_back(c);
  }
  for (auto& cls : classes) {
    auto& m = cls.methods[0];
    for (auto calls = 1 + rng.Below(4); calls > 0; --calls) {
      if (rng.Below(3) == 0) {
        const auto& entry = catalog.entries[rng.Below(catalog.size())];
        m.code.push_back(dex::ForgeInsn::Invoke(dex::InvokeStyle::kVirtual,
                                                {entry.package_prefixes[0] + "Api;", "call", "()V"}));
      } else {
        m.code.push_back(dex::ForgeInsn::Invoke(dex::InvokeStyle::kStatic,
                                                {pkg + "H" + std::to_string(rng.Below(helpers)) + ";", "step", "()V"}));
      }
    }
    m.code.push_back(dex::ForgeInsn::ReturnVoid());
  }
  app.dexes.push_back({{}, classes});
  return app;
}

LibUsageVector UsageOf(const AppSpec& app) {
  const ApkBundle bundle = OpenApkBytes(ForgeApk(app));
  std::vector<dex::DexFile> dexes;
  for (const auto& e : bundle.dex_entries) dexes.push_back(dex::ParseDex(e.bytes));
  return CountPaths(BuildIccg(dexes, ParseManifest(bundle.manifest_bytes)), DefaultCatalog());
}

// 10. Unreachable code does not change library path counts.
Outcome UnreachableInvariance() {
  Rng rng(10);
  const auto& catalog = DefaultCatalog();
  std::size_t ok = 0, nonzero = 0;
  const std::size_t apps = 50;
  for (std::size_t a = 0; a < apps; ++a) {
    AppSpec app = RandomReachableApp(rng, a);
    const LibUsageVector before = UsageOf(app);
    for (auto c : before.counts) nonzero += c > 0;
    // Unreachable classes call library code and reachable app code; nothing
    // reaches them. Some go into a second dex file.
    const std::string pkg = "Lcom/acc/app" + std::to_string(a) + "/";
    dex::DexSpec extra;
    for (auto n = 1 + rng.Below(4); n > 0; --n) {
      dex::ForgeClass dead{pkg + "Dead" + std::to_string(n) + ";"};
      dex::ForgeMethod m{"unused", "()V"};
      for (auto k = 1 + rng.Below(5); k > 0; --k) {
        const auto& entry = catalog.entries[rng.Below(catalog.size())];
        m.code.push_back(dex::ForgeInsn::Invoke(dex::InvokeStyle::kVirtual,
                                                {entry.package_prefixes[0] + "Other;", "go", "()V"}));
      }
      m.code.push_back(dex::ForgeInsn::Invoke(dex::InvokeStyle::kStatic, {pkg + "H0;", "step", "()V"}));
      m.code.push_back(dex::ForgeInsn::ReturnVoid());
      dead.methods.push_back(m);
      (rng.Below(2) == 0 ? app.dexes[0].classes : extra.classes).push_back(dead);
    }
    if (!extra.classes.empty()) app.dexes.push_back(extra);
    ok += UsageOf(app) == before;
  }
  return {ok == apps && nonzero > 0, Fmt("%zu/%zu apps unchanged (%zu non-zero slots checked)", ok, apps, nonzero)};
}

}  // namespace
}  // namespace bctx

int main() {
  using bctx::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"DEX forge/parse round-trip", bctx::DexRoundTrip},
      {"byte-to-pixel preservation", bctx::BytePreservation},
      {"SCC path counts vs enumeration", bctx::PathCounts},
      {"gradient checks", bctx::Gradients},
      {"separable corpus macro F1", bctx::Separable},
      {"permutation importance attribution", bctx::ImportanceAttribution},
      {"fusion gain over bytecode-only", bctx::FusionGain},
      {"robustness to dead bytes and manifest flips", bctx::Robustness},
      {"end-to-end reproducibility", bctx::Reproducibility},
      {"unreachable-code invariance", bctx::UnreachableInvariance},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
