// tests/cli_test.cc

// Copyright 2026  The sreval Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.h"
#include "json.hpp"
#include "sreval/det.h"
#include "sreval/submission.h"
#include "sreval/synth.h"
#include "testlib.h"

namespace sreval {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome RunCli(std::vector<std::string> args) {
  args.insert(args.begin(), "sreval");
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir;
    out_ = new SynthOutput(Generate(testing::SmallEvalSpec(77)));
    WriteSynth(*out_, dir_->Sub("eval"));
  }
  static void TearDownTestSuite() {
    delete out_;
    delete dir_;
  }
  static std::string P(const std::string &name) { return dir_->Sub("eval/" + name); }

  static testing::TempDir *dir_;
  static SynthOutput *out_;
};
testing::TempDir *CliTest::dir_ = nullptr;
SynthOutput *CliTest::out_ = nullptr;

TEST_F(CliTest, ScoreMatchesTheLibrary) {
  const Outcome r = RunCli({"score", "--trials", P("key.tsv"), "--models", P("models.tsv"),
                         "--scores", P("scores.tsv"), "--format", "machine"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], cli::kSchemaVersion);
  EXPECT_EQ(j["record"], "score");
  EXPECT_EQ(j["params"]["beta"], 19.0);
  // The scores file round-trips exactly, so the costs are identical.
  const AggregateCost a = AggregateActual(out_->oracle_llr, out_->manifest, CostParams());
  const AggregateMinCost m = AggregateMin(out_->oracle_llr, out_->manifest, CostParams());
  EXPECT_EQ(j["final_actual"].get<double>(), a.final);
  EXPECT_EQ(j["final_min"].get<double>(), m.final);
  EXPECT_EQ(j["per_source"]["mls"]["min"]["theta"].get<double>(), m.per_source[1]->theta);
  EXPECT_EQ(j["per_cell"].size(), kNumCells);

  const Outcome human = RunCli({"score", "--trials", P("key.tsv"), "--scores", P("scores.tsv")});
  ASSERT_EQ(human.code, 0);
  EXPECT_NE(human.out.find("theta = ln(beta) = 2.944439"), std::string::npos);
  EXPECT_NE(human.out.find("final"), std::string::npos);

  AggregateOptions opt;
  opt.subset = Subset::kTest;
  const Outcome test = RunCli({"score", "--trials", P("key.tsv"), "--scores", P("scores.tsv"),
                            "--subset", "test", "--format", "machine"});
  EXPECT_EQ(json::parse(test.out)["final_actual"].get<double>(),
            AggregateActual(out_->oracle_llr, out_->manifest, CostParams(), opt).final);
}

TEST_F(CliTest, ValidateAndExitCodes) {
  Outcome r = RunCli({"validate", "--trials", P("trials.tsv"), "--scores", P("scores.tsv"),
                   "--format", "machine"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["accepted"].get<bool>());

  std::string text = testing::ReadText(P("scores.tsv"));
  const auto cut = text.find('\n', text.find('\n') + 1);  // header + first row
  const std::string short_file = dir_->Sub("short.tsv");
  testing::WriteText(short_file, text.substr(0, text.find('\n') + 1) + text.substr(cut + 1));
  r = RunCli({"validate", "--trials", P("key.tsv"), "--scores", short_file, "--format",
           "machine"});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_EQ(json::parse(r.out)["n_missing"], 1);
  r = RunCli({"score", "--trials", P("key.tsv"), "--scores", short_file});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("rejected"), std::string::npos);

  const std::string broken = dir_->Sub("broken.tsv");
  testing::WriteText(broken, "modelid\tsegmentid\tLLR\na\tb\tone\n");
  r = RunCli({"score", "--trials", P("key.tsv"), "--scores", broken});
  EXPECT_EQ(r.code, cli::kParse);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;

  EXPECT_EQ(RunCli({"score", "--trials", P("key.tsv")}).code, cli::kConfig);
  EXPECT_EQ(RunCli({"score", "--trials", P("key.tsv"), "--scores", P("scores.tsv"),
                 "--p-target", "1.5"}).code,
            cli::kConfig);
  EXPECT_EQ(RunCli({"frobnicate"}).code, cli::kConfig);
  EXPECT_EQ(RunCli({"score", "--trials", dir_->Sub("nope.tsv"), "--scores", P("scores.tsv")})
                .code,
            cli::kParse);
}

TEST_F(CliTest, EmptyCellNeedsPartial) {
  // Drop every mls/female/3 trial from the key and the scores.
  std::vector<Trial> kept;
  std::vector<double> llr;
  for (std::size_t i = 0; i < out_->manifest.trials().size(); ++i) {
    const Trial &t = out_->manifest.trials()[i];
    if (t.source == Source::kMls && t.gender == Gender::kFemale && t.n_enroll == 3) continue;
    kept.push_back(t);
    llr.push_back(out_->oracle_llr[i]);
  }
  const TrialSetManifest m(kept);
  std::ostringstream key;
  WriteKey(m, key);
  testing::WriteText(dir_->Sub("holey_key.tsv"), key.str());
  testing::WriteText(dir_->Sub("holey_scores.tsv"), testing::ScoresText(m, llr));
  Outcome r = RunCli({"score", "--trials", dir_->Sub("holey_key.tsv"), "--scores",
                   dir_->Sub("holey_scores.tsv")});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("mls/female/3"), std::string::npos) << r.err;
  r = RunCli({"score", "--trials", dir_->Sub("holey_key.tsv"), "--scores",
           dir_->Sub("holey_scores.tsv"), "--partial", "--format", "machine"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("skipped empty cell mls/female/3"), std::string::npos) << r.err;
  EXPECT_EQ(json::parse(r.out)["warnings"].size(), 1u);
}

TEST_F(CliTest, DetWritesCurves) {
  const std::string out_dir = dir_->Sub("det");
  const Outcome r = RunCli({"det", "--trials", P("key.tsv"), "--scores", P("scores.tsv"),
                         "--by", "source", "--out", out_dir, "--format", "machine"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    EXPECT_EQ(j["record"], "det");
    EXPECT_TRUE(fs::exists(j["path"].get<std::string>()));
    EXPECT_TRUE(fs::exists(j["contour_path"].get<std::string>()));
    ++n;
  }
  EXPECT_EQ(n, 2);
  // The minimum marker agrees with the source-level min cost.
  const AggregateMinCost m = AggregateMin(out_->oracle_llr, out_->manifest, CostParams());
  std::istringstream again(r.out);
  std::getline(again, line);
  const json cmn2 = json::parse(line);
  EXPECT_EQ(cmn2["name"], "cmn2");
  EXPECT_NEAR(cmn2["minimum"]["c_norm"].get<double>(), m.per_source[0]->c_norm, 1e-12);
  const std::string det_text = testing::ReadText(out_dir + "/det_cmn2.tsv");
  EXPECT_EQ(det_text.rfind("theta\tp_fa\tp_miss", 0), 0u);
}

TEST_F(CliTest, BootstrapIsReproducible) {
  const std::vector<std::string> args = {"bootstrap", "--trials", P("key.tsv"),
                                         "--scores", P("scores.tsv"),
                                         "--n", "200", "--seed", "99", "--format", "machine"};
  const Outcome a = RunCli(args), b = RunCli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json j = json::parse(a.out);
  EXPECT_EQ(j["seed"], 99);
  EXPECT_EQ(j["generator"], "mt19937_64");
  EXPECT_EQ(j["resample_costs"].size(), 200u);
  EXPECT_LE(j["lo"].get<double>(), j["hi"].get<double>());
}

TEST(Cli, SynthAndBackendPipeline) {
  testing::TempDir dir;
  testing::WriteText(dir.Sub("spec.toml"), R"(
seed = 3
dim = 8
segments_per_speaker = 16
[between]
kind = "geometric"
scale = 20.0
ratio = 0.8
[within]
kind = "identity"
[train]
speakers = 200
segments_per_speaker = 6
[[block]]
source = "cmn2"
subset = "progress"
targets = 60
nontargets = 400
frac_3seg = 0.3
male_speakers = 6
female_speakers = 6
languages = ["ara-aeb"]
[[block]]
source = "mls"
subset = "progress"
targets = 60
nontargets = 400
frac_3seg = 0.3
male_speakers = 6
female_speakers = 6
languages = ["eng-usg"]
)");
  Outcome r = RunCli({"synth", "--spec", dir.Sub("spec.toml"), "--out", dir.Sub("eval"),
                   "--format", "machine"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json s = json::parse(r.out);
  EXPECT_EQ(s["n_trials"], 920);
  EXPECT_EQ(s["n_target"], 120);
  EXPECT_EQ(s["n_train"], 1200);
  const std::string first_key = testing::ReadText(dir.Sub("eval/key.tsv"));
  ASSERT_EQ(RunCli({"synth", "--spec", dir.Sub("spec.toml"), "--out", dir.Sub("again")}).code, 0);
  EXPECT_EQ(testing::ReadText(dir.Sub("again/key.tsv")), first_key);

  r = RunCli({"backend-fit", "--train", dir.Sub("eval/train.tsv"), "--train-manifest",
           dir.Sub("eval/train.manifest.tsv"), "--out", dir.Sub("model.json"), "--lda-dim",
           "6", "--format", "machine"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json f = json::parse(r.out);
  EXPECT_EQ(f["n_train"], 1200);
  EXPECT_EQ(f["output_dim"], 6);

  r = RunCli({"backend-score", "--model", dir.Sub("model.json"), "--embeddings",
           dir.Sub("eval/embeddings.tsv"), "--embeddings-manifest",
           dir.Sub("eval/embeddings.manifest.tsv"), "--trials", dir.Sub("eval/trials.tsv"),
           "--models", dir.Sub("eval/models.tsv"), "--out", dir.Sub("backend_scores.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = RunCli({"score", "--trials", dir.Sub("eval/key.tsv"), "--scores",
           dir.Sub("backend_scores.tsv"), "--format", "machine"});
  ASSERT_EQ(r.code, 0) << r.err;
  // A trained backend separates the speakers far better than chance.
  EXPECT_LT(json::parse(r.out)["final_min"].get<double>(), 0.5);

  // An unreadable input file is a parse failure.
  EXPECT_EQ(RunCli({"synth", "--spec", dir.Sub("missing.toml"), "--out", dir.Sub("x")}).code,
            cli::kParse);
}

}  // namespace
}  // namespace sreval
