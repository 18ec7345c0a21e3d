// tests/testlib.h

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

// Helpers shared by the unit tests and the acceptance binary. The oracles
// here are written from the definitions, deliberately without the sort-and-
// sweep structure of the library, so that agreement means something.

#ifndef SREVAL_TESTS_TESTLIB_H_
#define SREVAL_TESTS_TESTLIB_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sreval/metrics.h"
#include "sreval/random.h"
#include "sreval/synth.h"
#include "sreval/trialset.h"

namespace sreval::testing {

// ---------------------------------------------------------------------------
// Brute-force cost oracle, O(n) per threshold and O(n^2) overall.

struct BrutePoint {
  double theta = 0.0;
  std::vector<std::size_t> miss, fa;  // per group
  double p_miss = 0.0, p_fa = 0.0, c_norm = 0.0;
};

struct ScoreSet {
  std::vector<std::vector<ScoredTrial>> groups;
  std::vector<double> weights;

  std::vector<WeightedGroup> View() const;
  std::size_t size() const;
};

// -inf, (a + b) / 2 for adjacent distinct scores, +inf.
std::vector<double> BruteThresholds(const ScoreSet &set);
BrutePoint BruteAt(const ScoreSet &set, double beta, double theta);
std::vector<BrutePoint> BruteSweep(const ScoreSet &set, double beta);
// First minimum in increasing threshold order.
BrutePoint BruteMin(const ScoreSet &set, double beta);

// Random groups with ties (scores on a coarse grid about half the time),
// at least one target and one nontarget per group, <= max_trials overall.
ScoreSet RandomScoreSet(Rng &rng, std::size_t max_trials);

// ---------------------------------------------------------------------------
// Published trial-count fixtures.

// One (source, subset) row of the trial-count tables: targets and
// nontargets by gender and by number of enrollment segments.
struct TableRow {
  Source source;
  Subset subset;
  CellCounts male, female, enroll1, enroll3;
  CellCounts Total() const {
    CellCounts c = male;
    c += female;
    return c;
  }
};

std::vector<TableRow> LoadTableRows(const std::string &path);

// Key file with exactly the tabulated marginals. The joint gender x
// enrollment split is not published; it is filled in proportionally.
std::string ExpandTableKey(const std::vector<TableRow> &rows);

std::string FixturePath(const std::string &name);

// ---------------------------------------------------------------------------
// Synthetic populations.

// Four small blocks (two sources x two subsets), every cell scorable.
PopulationSpec SmallEvalSpec(std::uint64_t seed);

// One progress block per source with `models_per_source` enrollment models
// (each speaker gives a 1- and a 3-segment model) and
// `trials_per_model` trials per model, 20% targets.
PopulationSpec BootstrapSpec(std::size_t models_per_source,
                             std::size_t trials_per_model, std::uint64_t seed);

// Large single-language blocks for calibration checks.
PopulationSpec CalibrationSpec(std::size_t trials_per_block, std::uint64_t seed);

// ---------------------------------------------------------------------------

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }
  std::string Sub(const std::string &name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

void WriteText(const std::string &path, const std::string &text);
std::string ReadText(const std::string &path);

// Scores file text for `llr` aligned with manifest.trials().
std::string ScoresText(const TrialSetManifest &manifest,
                       const std::vector<double> &llr);

}  // namespace sreval::testing

#endif  // SREVAL_TESTS_TESTLIB_H_
