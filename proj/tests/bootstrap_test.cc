// tests/bootstrap_test.cc

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

#include <cstring>
#include <set>

#include <gtest/gtest.h>

#include "sreval/bootstrap.h"
#include "sreval/synth.h"
#include "testlib.h"

namespace sreval {
namespace {

TEST(QuantileType7, MatchesLinearInterpolation) {
  const std::vector<double> x = {1, 2, 3, 4, 10};
  EXPECT_EQ(QuantileType7(x, 0.0), 1.0);
  EXPECT_EQ(QuantileType7(x, 1.0), 10.0);
  EXPECT_EQ(QuantileType7(x, 0.25), 2.0);
  EXPECT_NEAR(QuantileType7(x, 0.9), 7.6, 1e-12);
  EXPECT_NEAR(QuantileType7(x, 0.5), 3.0, 1e-12);
  const std::vector<double> one = {4.5};
  EXPECT_EQ(QuantileType7(one, 0.3), 4.5);
  EXPECT_THROW(QuantileType7(std::vector<double>{}, 0.5), MetricError);
}

class BootstrapTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    out_ = new SynthOutput(Generate(testing::BootstrapSpec(50, 30, 4)));
  }
  static void TearDownTestSuite() { delete out_; }
  static SynthOutput *out_;
};
SynthOutput *BootstrapTest::out_ = nullptr;

bool BitEqual(const std::vector<double> &a, const std::vector<double> &b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

TEST_F(BootstrapTest, FixedSeedIsReproducible) {
  BootstrapConfig cfg;
  cfg.seed = 12345;
  const CiResult a = BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg);
  const CiResult b = BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg);
  ASSERT_EQ(a.resample_costs.size(), 1000u);
  EXPECT_TRUE(BitEqual(a.resample_costs, b.resample_costs));
  cfg.threads = 4;
  const CiResult c = BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg);
  EXPECT_TRUE(BitEqual(a.resample_costs, c.resample_costs));
  EXPECT_EQ(a.lo, c.lo);
  EXPECT_EQ(a.hi, c.hi);
  cfg.seed = 12346;
  const CiResult d = BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg);
  EXPECT_FALSE(BitEqual(a.resample_costs, d.resample_costs));
  EXPECT_EQ(a.generator, "mt19937_64");
  EXPECT_EQ(a.n_models, 200u);
}

TEST_F(BootstrapTest, PointEstimateAndInterval) {
  BootstrapConfig cfg;
  cfg.n_resamples = 500;
  const CiResult r = BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg);
  EXPECT_EQ(r.point, AggregateActual(out_->oracle_llr, out_->manifest, CostParams()).final);
  EXPECT_LE(r.lo, r.point);
  EXPECT_GE(r.hi, r.point);
  EXPECT_LT(r.lo, r.hi);
  std::vector<double> sorted = r.resample_costs;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(r.lo, QuantileType7(sorted, 0.025));
  EXPECT_EQ(r.hi, QuantileType7(sorted, 0.975));
  EXPECT_GE(r.total_draws, cfg.n_resamples);
}

TEST_F(BootstrapTest, TwoLevelIsDeterministicAndWider) {
  BootstrapConfig cfg;
  cfg.n_resamples = 400;
  cfg.two_level = true;
  const CiResult a = BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg);
  cfg.threads = 3;
  const CiResult b = BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg);
  EXPECT_TRUE(BitEqual(a.resample_costs, b.resample_costs));
  cfg.two_level = false;
  const CiResult c = BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg);
  EXPECT_FALSE(BitEqual(a.resample_costs, c.resample_costs));
}

TEST_F(BootstrapTest, SubsetRestriction) {
  BootstrapConfig cfg;
  cfg.n_resamples = 50;
  AggregateOptions opt;
  opt.subset = Subset::kTest;  // the bootstrap fixture has no test trials
  EXPECT_THROW(BootstrapCost(out_->oracle_llr, out_->manifest, CostParams(), cfg, opt),
               MetricError);
}

TEST(Bootstrap, WidthShrinksWithMoreModels) {
  BootstrapConfig cfg;
  cfg.n_resamples = 300;
  double width[2];
  int i = 0;
  for (std::size_t speakers : {std::size_t{12}, std::size_t{125}}) {
    const SynthOutput out = Generate(testing::BootstrapSpec(speakers, 30, 21));
    const CiResult r = BootstrapCost(out.oracle_llr, out.manifest, CostParams(), cfg);
    width[i++] = r.hi - r.lo;
  }
  EXPECT_LT(width[1], width[0]);
}

// 200 models; one model alone carries the targets of each cell, so a
// resample keeps every cell scorable with probability about 0.63^8.
TrialSetManifest FragileManifest(std::vector<double> *llr) {
  std::vector<Trial> trials;
  for (int m = 0; m < 200; ++m) {
    for (std::size_t c = 0; c < kNumCells; ++c) {
      const ConditionCell cell = ConditionCell::FromIndex(c);
      Trial t;
      t.model_id = "m" + std::to_string(m);
      t.segment_id = "s" + std::to_string(c);
      t.source = cell.source;
      t.gender = cell.gender;
      t.n_enroll = cell.n_enroll;
      t.language = "eng-usg";
      t.phone_match = PhoneMatch::kUnknown;
      t.label = static_cast<std::size_t>(m) == c ? Label::kTarget : Label::kNontarget;
      trials.push_back(t);
      llr->push_back(t.label == Label::kTarget ? 5.0 : -5.0);
    }
  }
  return TrialSetManifest(std::move(trials));
}

TEST(Bootstrap, RedrawsAndAbortsOnDegenerateResamples) {
  std::vector<double> llr;
  const TrialSetManifest m = FragileManifest(&llr);
  BootstrapConfig cfg;
  cfg.n_resamples = 50;
  try {
    BootstrapCost(llr, m, CostParams(), cfg);
    FAIL() << "expected an abort";
  } catch (const MetricError &e) {
    EXPECT_NE(std::string(e.what()).find("bootstrap aborted"), std::string::npos);
  }
  cfg.n_resamples = 1;
  EXPECT_THROW(BootstrapCost(llr, m, CostParams(), cfg), MetricError);
}

TEST(Bootstrap, RejectsTooFewModelsAndBadConfig) {
  std::vector<Trial> trials(2);
  trials[0].model_id = trials[1].model_id = "only";
  trials[0].segment_id = "a";
  trials[1].segment_id = "b";
  trials[0].label = Label::kTarget;
  const TrialSetManifest m(trials);
  const std::vector<double> llr = {1.0, 0.0};
  EXPECT_THROW(BootstrapCost(llr, m, CostParams(), BootstrapConfig{}), MetricError);
  BootstrapConfig bad;
  bad.level = 1.0;
  EXPECT_THROW(BootstrapCost(llr, m, CostParams(), bad), ConfigError);
  bad = {};
  bad.n_resamples = 0;
  EXPECT_THROW(BootstrapCost(llr, m, CostParams(), bad), ConfigError);
}

TEST(Rng, StreamsAreDistinctAndStable) {
  Rng a = Rng::ForStream(7, 0), b = Rng::ForStream(7, 1), c = Rng::ForStream(7, 0);
  const auto x = a.NextU64();
  EXPECT_NE(x, b.NextU64());
  EXPECT_EQ(x, c.NextU64());
  // mt19937_64 with the default seed; the 10000th output is fixed by the
  // C++ standard.
  std::mt19937_64 ref;
  ref.discard(9999);
  EXPECT_EQ(ref(), 9981545732273789042ull);
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.Uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    ASSERT_LT(u.Below(7), 7u);
  }
  // SplitMix64 reference output for input 0.
  EXPECT_EQ(Mix64(0), 0xe220a8397b1dcdafull);
}

TEST(Rng, NormalMoments) {
  Rng r(42);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.Normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

}  // namespace
}  // namespace sreval
