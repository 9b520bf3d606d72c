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

#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "bctx/fusion.h"
#include "cli.h"
#include "oracles.h"

namespace bctx::cli {
namespace {

using oracle::ThrownCode;
namespace fs = std::filesystem;

std::string ReadFileText(const fs::path& path) {
  const Bytes b = ReadFile(path);
  return std::string(b.begin(), b.end());
}

struct Result {
  int code;
  std::string out, err;
};

Result Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bctx");
  std::ostringstream out, err;
  const int code = Run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::vector<std::string> kFast = {"--set", "epochs=8", "--set", "hidden_width=16", "--set", "hidden_layers=1",
                                        "--set", "d_common=8", "--set", "batch_size=8"};

std::vector<std::string> With(std::vector<std::string> args) {
  args.insert(args.begin(), kFast.begin(), kFast.end());
  return args;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("bctx_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Cli({"--help"}).code, kExitOk);
  EXPECT_EQ(Cli({}).code, kExitUsage);
  EXPECT_EQ(Cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Cli({"train", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(Cli({"train", "--cache", P("c")}).code, kExitUsage);  // --model missing
  EXPECT_EQ(Cli({"--set", "nonsense=1", "forge-corpus", "--out", P("x")}).code, kExitUsage);
  EXPECT_EQ(Cli({"--set", "novalue", "forge-corpus", "--out", P("x")}).code, kExitUsage);
}

TEST_F(CliTest, FullPipeline) {
  ASSERT_EQ(Cli({"forge-corpus", "--out", P("corpus"), "--per-class", "6"}).code, kExitOk);
  const auto ex = Cli({"--jobs", "2", "extract", "--manifest", P("corpus/corpus.jsonl"), "--out", P("cache")});
  ASSERT_EQ(ex.code, kExitOk) << ex.err;
  const auto summary = nlohmann::json::parse(ex.out);
  EXPECT_EQ(summary["extracted"], 18);
  const auto again = nlohmann::json::parse(Cli({"extract", "--manifest", P("corpus/corpus.jsonl"), "--out", P("cache")}).out);
  EXPECT_EQ(again["cached"], 18);

  const auto tr = Cli(With({"train", "--cache", P("cache"), "--model", P("m.bin")}));
  ASSERT_EQ(tr.code, kExitOk) << tr.err;
  EXPECT_TRUE(fs::exists(P("m.bin.meta.json")));
  EXPECT_TRUE(fs::exists(P("m.bin.log.jsonl")));
  const auto meta = ModelMeta::FromJson(ReadFileText(P("m.bin.meta.json")));
  EXPECT_EQ(meta.train_ids.size() + meta.test_ids.size(), 18u);

  const auto ev = Cli(With({"eval", "--cache", P("cache"), "--model", P("m.bin"), "--report", P("r.json")}));
  ASSERT_EQ(ev.code, kExitOk) << ev.err;
  const auto report = nlohmann::json::parse(ReadFileText(P("r.json")));
  EXPECT_EQ(report["labels"].size(), 3u);

  const auto imp = Cli(With({"importance", "--cache", P("cache"), "--model", P("m.bin"), "--view", "all"}));
  ASSERT_EQ(imp.code, kExitOk) << imp.err;

  const auto pm = Cli(With({"perturb", "--cache", P("cache"), "--op", "manifest_flip", "--mag", "2", "--model", P("m.bin"),
                            "--out", P("flipped")}));
  ASSERT_EQ(pm.code, kExitOk) << pm.err;
  const auto pd = Cli(With({"perturb", "--cache", P("cache"), "--op", "dead_bytes", "--mag", "0.5", "--manifest",
                            P("corpus/corpus.jsonl"), "--model", P("m.bin")}));
  ASSERT_EQ(pd.code, kExitOk) << pd.err;
  EXPECT_EQ(Cli({"perturb", "--cache", P("cache"), "--op", "explode", "--mag", "1"}).code, kExitData);

  const auto split = Cli(With({"eval", "--cache", P("cache"), "--split", "--ablate"}));
  ASSERT_EQ(split.code, kExitOk) << split.err;
  EXPECT_TRUE(nlohmann::json::parse(split.out).contains("bytecode_only"));
  const auto kf = Cli(With({"eval", "--cache", P("cache"), "--kfold", "3"}));
  ASSERT_EQ(kf.code, kExitOk) << kf.err;
  EXPECT_EQ(nlohmann::json::parse(kf.out)["folds"], 3);

  // A different vocabulary fingerprint is refused unless explicitly allowed.
  ASSERT_EQ(Cli(With({"train", "--cache", P("cache"), "--model", P("m2.bin")})).code, kExitOk);
  auto tampered = ModelMeta::FromJson(ReadFileText(P("m2.bin.meta.json")));
  tampered.vocabulary.push_back("zz:extra");
  WriteFile(P("m2.bin.meta.json"), tampered.ToJson());
  const auto mismatch = Cli({"eval", "--cache", P("cache"), "--model", P("m2.bin")});
  EXPECT_EQ(mismatch.code, kExitData);
  EXPECT_NE(mismatch.err.find("FingerprintMismatch"), std::string::npos);
}

TEST_F(CliTest, ForgeRenderGraph) {
  WriteFile(P("app.json"), std::string_view(R"({
    "package": "com.demo",
    "permissions": ["android.permission.INTERNET"],
    "components": [{"kind": "activity", "name": ".Main", "actions": ["android.intent.action.MAIN"]}],
    "dex": [{"classes": [{"type": "Lcom/demo/Main;", "superclass": "Landroid/app/Activity;",
      "methods": [{"name": "onCreate", "descriptor": "(Landroid/os/Bundle;)V",
        "code": [{"op": "const-string", "value": "http://demo.example.com"},
                 {"op": "invoke-virtual", "target": "Lcom/google/android/gms/ads/AdView;->loadAd()V"},
                 {"op": "return-void"}]}]}]}]
  })"));
  ASSERT_EQ(Cli({"forge", "--spec", P("app.json"), "--out", P("app.apk")}).code, kExitOk);
  ASSERT_EQ(Cli({"render", "--apk", P("app.apk"), "--png", P("app.png")}).code, kExitOk);
  const auto png = oracle::DecodePng(ReadFile(P("app.png")));
  EXPECT_EQ(png.width, 300u);
  ASSERT_EQ(Cli({"graph", "--apk", P("app.apk"), "--dot", P("g.dot"), "--json", P("g.json")}).code, kExitOk);
  EXPECT_NE(ReadFileText(P("g.dot")).find("loadAd"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(ReadFileText(P("g.json")))["edges"].size(), 2u);
  WriteFile(P("bad.json"), std::string_view("{\"dex\": 3}"));
  EXPECT_EQ(Cli({"forge", "--spec", P("bad.json"), "--out", P("bad.apk")}).code, kExitUsage);
  EXPECT_EQ(Cli({"render", "--apk", P("missing.apk"), "--png", P("x.png")}).code, kExitData);
}

TEST_F(CliTest, SynthCache) {
  ASSERT_EQ(Cli({"synth", "--kind", "separable", "--out", P("s")}).code, kExitOk);
  EXPECT_EQ(LoadCache(P("s")).size(), 400u);
}

TEST(RunConfigTest, KeysAndFiles) {
  RunConfig c;
  c.Set("profile", "full");
  EXPECT_EQ(c.protocol.train.hidden_width, 3000u);
  c.Set("views", "bin,lib");
  EXPECT_EQ(c.protocol.train.views, (ViewMask{true, false, true}));
  c.Set("backend", "dense");
  EXPECT_EQ(c.extract.backend, EmbedderBackend::kDenseCnn);
  c.Set("encoder", "joint");
  EXPECT_TRUE(c.protocol.train.encoder.has_value());
  EXPECT_EQ(ThrownCode([&] { c.Set("epochs", "many"); }), ErrorCode::kBadConfig);
  EXPECT_EQ(ThrownCode([&] { c.Set("unknown_key", "1"); }), ErrorCode::kBadConfig);
  const auto path = fs::temp_directory_path() / "bctx_cli_config.conf";
  WriteFile(path, std::string_view("# comment\nseed = 7\n\nlearning_rate = 0.01  # inline\n"));
  RunConfig f;
  f.ApplyFile(path);
  EXPECT_EQ(f.seed, 7u);
  EXPECT_DOUBLE_EQ(f.protocol.train.learning_rate, 0.01);
  WriteFile(path, std::string_view("no equals sign\n"));
  EXPECT_EQ(ThrownCode([&] { RunConfig().ApplyFile(path); }), ErrorCode::kBadConfig);
  fs::remove(path);
}

TEST(ModelMetaTest, JsonRoundTrip) {
  ModelMeta m;
  m.seed = 9;
  m.test_fraction = 0.2;
  m.vocabulary = {"a", "b"};
  m.train_ids = {"x"};
  m.test_ids = {"y", "z"};
  const auto back = ModelMeta::FromJson(m.ToJson());
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.vocabulary, m.vocabulary);
  EXPECT_EQ(back.test_ids, m.test_ids);
  EXPECT_EQ(MetaPath("dir/model.bin"), fs::path("dir/model.bin.meta.json"));
}

}  // namespace
}  // namespace bctx::cli
