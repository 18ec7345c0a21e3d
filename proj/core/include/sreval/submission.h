// sreval/submission.h

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

#ifndef SREVAL_SUBMISSION_H_
#define SREVAL_SUBMISSION_H_

#include <chrono>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sreval/trialset.h"

namespace sreval {

/// Parsed score file: (model, segment) -> natural-log LLR. Every value is
/// finite and every key appeared once.
using RawScores = std::unordered_map<TrialKey, double, TrialKeyHash>;

/// A complete, validated system output. `llr[i]` is the score of
/// `list.keys()[i]` for the trial list it was validated against.
struct Submission {
  std::string team_id;
  std::chrono::system_clock::time_point received_at{};
  std::vector<double> llr;
};

struct ValidationReport {
  static constexpr std::size_t kMaxListed = 100;

  std::size_t n_missing = 0;
  std::size_t n_extra = 0;
  std::vector<TrialKey> missing;  // first kMaxListed, in trial-list order
  std::vector<TrialKey> extra;    // first kMaxListed, sorted

  bool accepted() const { return n_missing == 0 && n_extra == 0; }
  std::string Summary() const;
};

struct ValidationResult {
  ValidationReport report;
  std::optional<Submission> submission;  // set iff report.accepted()
};

/// Reads scores.tsv (header `modelid segmentid LLR`). Throws ParseError
/// with the line number on a bad column count, a non-numeric or non-finite
/// LLR, or a duplicate row.
RawScores ParseScores(std::istream &is);
RawScores LoadScores(const std::string &path);

/// Checks that the score keys are exactly the trial list. Only the blind
/// list is consulted, never the answer key.
ValidationResult Validate(const RawScores &scores, const TrialList &list,
                          std::string team_id = "",
                          std::chrono::system_clock::time_point received_at = {});

/// Writes scores in trial-list order, shortest round-trip formatting.
void WriteScores(const TrialList &list, std::span<const double> llr,
                 std::ostream &os);

}  // namespace sreval

#endif  // SREVAL_SUBMISSION_H_
