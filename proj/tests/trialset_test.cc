// tests/trialset_test.cc

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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "sreval/trialset.h"
#include "testlib.h"

namespace sreval {
namespace {

using testing::FixturePath;

const char *kHeader =
    "modelid\tsegmentid\ttargettype\tsource\tsubset\tgender\tn_enroll\t"
    "phone_match\tlanguage\tduration_s\n";

TrialSetManifest FromText(const std::string &key, const std::string &models = "") {
  std::istringstream k(key);
  if (models.empty()) return ReadTrials(k);
  std::istringstream m(models);
  return ReadTrials(k, &m);
}

TEST(Tokens, RoundTrip) {
  for (Source s : kAllSources) {
    Source back;
    ASSERT_TRUE(FromToken(ToToken(s), &back));
    EXPECT_EQ(back, s);
  }
  for (Subset s : kAllSubsets) {
    Subset back;
    ASSERT_TRUE(FromToken(ToToken(s), &back));
    EXPECT_EQ(back, s);
  }
  for (PhoneMatch p : {PhoneMatch::kSame, PhoneMatch::kDifferent, PhoneMatch::kUnknown}) {
    PhoneMatch back;
    ASSERT_TRUE(FromToken(ToToken(p), &back));
    EXPECT_EQ(back, p);
  }
  Gender g;
  EXPECT_FALSE(FromToken("Male", &g));
  Label l;
  EXPECT_TRUE(FromToken("target", &l));
  EXPECT_EQ(l, Label::kTarget);
}

TEST(ConditionCell, IndexIsDenseAndInvertible) {
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < kNumCells; ++i) {
    const ConditionCell c = ConditionCell::FromIndex(i);
    EXPECT_EQ(c.Index(), i);
    seen.insert(c.Index());
  }
  EXPECT_EQ(seen.size(), kNumCells);
  EXPECT_EQ((ConditionCell{Source::kMls, Gender::kFemale, 3}.Index()), 7u);
  EXPECT_EQ((ConditionCell{Source::kCmn2, Gender::kMale, 3}.Name()), "cmn2/male/3");
}

// Trial counts as published, per source and subset.
struct PublishedTotal {
  Source source;
  Subset subset;
  std::size_t targets, nontargets;
};
const PublishedTotal kPublished[] = {
    {Source::kCmn2, Subset::kProgress, 1804, 255178},
    {Source::kCmn2, Subset::kTest, 4123, 580256},
    {Source::kMls, Subset::kProgress, 17992, 141584},
    {Source::kMls, Subset::kTest, 53084, 351912},
};

TEST(PublishedFixture, TalliesMatchPublishedCounts) {
  const auto rows = testing::LoadTableRows(FixturePath("partition_counts.tsv"));
  ASSERT_EQ(rows.size(), 4u);
  const TrialSetManifest m = FromText(testing::ExpandTableKey(rows));

  for (const auto &p : kPublished) {
    const CellCounts c = m.Count(p.source, p.subset);
    EXPECT_EQ(c.n_target, p.targets) << ToToken(p.source) << "/" << ToToken(p.subset);
    EXPECT_EQ(c.n_nontarget, p.nontargets) << ToToken(p.source) << "/" << ToToken(p.subset);
  }
  // Per-partition marginals.
  for (const auto &r : rows) {
    CellCounts male, female, e1, e3;
    for (std::size_t i = 0; i < kNumCells; ++i) {
      const ConditionCell cell = ConditionCell::FromIndex(i);
      if (cell.source != r.source) continue;
      const CellCounts &c = m.Count(r.subset, cell);
      (cell.gender == Gender::kMale ? male : female) += c;
      (cell.n_enroll == 1 ? e1 : e3) += c;
    }
    EXPECT_EQ(male, r.male);
    EXPECT_EQ(female, r.female);
    EXPECT_EQ(e1, r.enroll1);
    EXPECT_EQ(e3, r.enroll3);
  }
  // A spot check written out by hand.
  CellCounts male;
  male += m.Count(Subset::kProgress, {Source::kCmn2, Gender::kMale, 1});
  male += m.Count(Subset::kProgress, {Source::kCmn2, Gender::kMale, 3});
  EXPECT_EQ(male.n_target, 501u);
  EXPECT_EQ(male.n_nontarget, 40552u);
  EXPECT_EQ(m.Count(Subset::kProgress).n_target + m.Count(Subset::kTest).n_target,
            1804u + 4123u + 17992u + 53084u);
}

TEST(CheckConditions, CleanFixtureHasNoViolations) {
  const TrialSetManifest m = LoadTrials(FixturePath("faults/key_clean.tsv"),
                                        FixturePath("faults/models_clean.tsv"));
  const ConditionReport r = CheckConditions(m);
  EXPECT_TRUE(r.violations.empty()) << r.violations.front().rule;
}

TEST(CheckConditions, ReportsExactlyTheInjectedFaults) {
  const TrialSetManifest m = LoadTrials(FixturePath("faults/key_faulty.tsv"),
                                        FixturePath("faults/models_faulty.tsv"));
  const ConditionReport r = CheckConditions(m);

  std::multiset<std::string> got, want;
  for (const auto &v : r.violations) {
    std::string subject = v.subject;
    std::replace(subject.begin(), subject.end(), '\t', ':');
    got.insert(std::string(v.severity == Severity::kError ? "error" : "warning") + " " +
               v.rule + " " + subject);
  }
  std::ifstream is(FixturePath("faults/expected.tsv"));
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::replace(line.begin(), line.end(), '\t', ' ');
    if (!line.empty()) want.insert(line);
  }
  EXPECT_EQ(want.size(), 7u);
  EXPECT_EQ(got, want);
  EXPECT_EQ(r.ErrorCount(), 6u);
  EXPECT_EQ(r.WarningCount(), 1u);
  EXPECT_FALSE(r.Clean());
}

TEST(CheckConditions, WithoutModelsUsesMajorityGender) {
  std::string key = kHeader;
  key += "m1\ts1\ttarget\tcmn2\tprogress\tmale\t1\tsame\tara-aeb\t20\n";
  key += "m1\ts2\tnontarget\tcmn2\tprogress\tmale\t1\tdifferent\tara-aeb\t20\n";
  key += "m1\ts3\tnontarget\tcmn2\tprogress\tfemale\t1\tdifferent\tara-aeb\t20\n";
  const ConditionReport r = CheckConditions(FromText(key));
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].rule, "cross-gender");
  EXPECT_EQ(r.violations[0].subject, "m1\ts3");
}

TEST(ReadTrials, ColumnsInAnyOrder) {
  const std::string key =
      "segmentid\tmodelid\tsource\ttargettype\tsubset\tgender\tn_enroll\t"
      "phone_match\tlanguage\tduration_s\n"
      "s1\tm1\tmls\ttarget\ttest\tfemale\t3\tunknown\teng-usg\t12.5\n";
  const TrialSetManifest m = FromText(key);
  ASSERT_EQ(m.trials().size(), 1u);
  const Trial &t = m.trials()[0];
  EXPECT_EQ(t.model_id, "m1");
  EXPECT_EQ(t.segment_id, "s1");
  EXPECT_EQ(t.label, Label::kTarget);
  EXPECT_EQ(t.source, Source::kMls);
  EXPECT_EQ(t.subset, Subset::kTest);
  EXPECT_EQ(t.gender, Gender::kFemale);
  EXPECT_EQ(t.n_enroll, 3);
  EXPECT_DOUBLE_EQ(t.duration_s, 12.5);
}

TEST(ReadTrials, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string &key) -> std::size_t {
    try {
      FromText(key);
    } catch (const ParseError &e) {
      return e.line();
    }
    return 0;
  };
  const std::string good = "m1\ts1\ttarget\tcmn2\tprogress\tmale\t1\tsame\tara-aeb\t20\n";
  EXPECT_EQ(line_of(std::string(kHeader) + good +
                    "m1\ts2\tbogus\tcmn2\tprogress\tmale\t1\tsame\tara-aeb\t20\n"),
            3u);
  EXPECT_EQ(line_of(std::string(kHeader) + good + "m1\ts2\ttarget\n"), 3u);
  EXPECT_EQ(line_of(std::string(kHeader) + good +
                    "m1\ts2\ttarget\tcmn2\tprogress\tmale\t2\tsame\tara-aeb\t20\n"),
            3u);
  EXPECT_THROW(FromText(std::string(kHeader) + good + good), ParseError);
  EXPECT_THROW(FromText(std::string(kHeader)), ParseError);
  EXPECT_THROW(FromText("modelid\tsegmentid\n" + good), ParseError);
}

TEST(WriteKey, RoundTripIsCanonical) {
  const TrialSetManifest m = LoadTrials(FixturePath("faults/key_clean.tsv"),
                                        FixturePath("faults/models_clean.tsv"));
  std::ostringstream k1, m1;
  WriteKey(m, k1);
  WriteModels(m.models(), m1);
  const TrialSetManifest again = FromText(k1.str(), m1.str());
  std::ostringstream k2, m2;
  WriteKey(again, k2);
  WriteModels(again.models(), m2);
  EXPECT_EQ(k1.str(), k2.str());
  EXPECT_EQ(m1.str(), m2.str());
  ASSERT_EQ(again.trials().size(), m.trials().size());
  for (std::size_t i = 0; i < m.trials().size(); ++i) {
    EXPECT_EQ(again.trials()[i].duration_s, m.trials()[i].duration_s);
    EXPECT_EQ(again.trials()[i].Cell(), m.trials()[i].Cell());
  }
  const EnrollmentModel *b3 = again.FindModel("mB3");
  ASSERT_NE(b3, nullptr);
  EXPECT_EQ(b3->segments.size(), 3u);
  EXPECT_EQ(again.FindModel("nope"), nullptr);
}

TEST(BlindList, HidesLabelsAndKeepsOrder) {
  const TrialSetManifest m = LoadTrials(FixturePath("faults/key_clean.tsv"));
  const TrialList list = m.BlindList();
  ASSERT_EQ(list.size(), m.trials().size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    EXPECT_EQ(list.keys()[i], m.trials()[i].Key());
    EXPECT_EQ(list.Find(m.trials()[i].Key()), i);
  }
  EXPECT_FALSE(list.Find({"mA", "nope"}).has_value());
  std::ostringstream os;
  WriteTrialList(list, os);
  EXPECT_EQ(os.str().find("target"), std::string::npos);
  std::istringstream is(os.str());
  EXPECT_EQ(ReadTrialList(is).keys(), list.keys());
}

TEST(Partition, CoversEveryTrialOnce) {
  const TrialSetManifest m = LoadTrials(FixturePath("faults/key_clean.tsv"));
  const CellPartition all = Partition(m);
  std::size_t total = 0;
  for (std::size_t c = 0; c < kNumCells; ++c) {
    for (std::size_t i : all[c]) EXPECT_EQ(m.trials()[i].Cell().Index(), c);
    total += all[c].size();
  }
  EXPECT_EQ(total, m.trials().size());
  const CellPartition test = Partition(m, Subset::kTest);
  std::size_t n_test = 0;
  for (const auto &p : test) n_test += p.size();
  EXPECT_EQ(n_test, 4u);
}

TEST(DurationBucket, FloorsToDecadeWithinRange) {
  EXPECT_EQ(DurationBucket(9.0), 10);
  EXPECT_EQ(DurationBucket(10.0), 10);
  EXPECT_EQ(DurationBucket(19.99), 10);
  EXPECT_EQ(DurationBucket(20.0), 20);
  EXPECT_EQ(DurationBucket(60.0), 60);
  EXPECT_EQ(DurationBucket(75.0), 60);
}

TEST(Languages, Inventory) {
  EXPECT_TRUE(IsKnownLanguage("ara-aeb"));
  EXPECT_TRUE(IsKnownLanguage("fre-waf"));
  EXPECT_FALSE(IsKnownLanguage("deu-std"));
}

}  // namespace
}  // namespace sreval
