// sreval/trialset.h

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

#ifndef SREVAL_TRIALSET_H_
#define SREVAL_TRIALSET_H_

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sreval/common.h"

namespace sreval {

struct TrialKey {
  std::string model_id;
  std::string segment_id;

  friend bool operator==(const TrialKey &, const TrialKey &) = default;
};

struct TrialKeyHash {
  std::size_t operator()(const TrialKey &k) const;
};

struct EnrollmentModel {
  std::string model_id;
  std::string speaker_id;
  Gender gender = Gender::kMale;
  std::vector<std::string> segments;  // 1 or 3 segment ids
  // Either a single phone id for the whole model or one per segment.
  std::vector<std::string> phone_ids;
};

/// One row of the answer key.
struct Trial {
  std::string model_id;
  std::string segment_id;
  Label label = Label::kNontarget;
  Source source = Source::kCmn2;
  Subset subset = Subset::kProgress;
  Gender gender = Gender::kMale;  // gender of the test-segment speaker
  int n_enroll = 1;
  PhoneMatch phone_match = PhoneMatch::kUnknown;
  std::string language;
  double duration_s = 0.0;

  ConditionCell Cell() const { return {source, gender, n_enroll}; }
  TrialKey Key() const { return {model_id, segment_id}; }
};

struct CellCounts {
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;

  CellCounts &operator+=(const CellCounts &o) {
    n_target += o.n_target;
    n_nontarget += o.n_nontarget;
    return *this;
  }
  friend bool operator==(const CellCounts &, const CellCounts &) = default;
};

/// The participant-visible trial list: (model, segment) pairs only, no labels
/// and no subset membership.
class TrialList {
 public:
  TrialList() = default;
  /// Throws Error on a duplicate pair.
  explicit TrialList(std::vector<TrialKey> keys);

  std::size_t size() const { return keys_.size(); }
  const std::vector<TrialKey> &keys() const { return keys_; }
  std::optional<std::size_t> Find(const TrialKey &key) const;

 private:
  std::vector<TrialKey> keys_;
  std::unordered_map<TrialKey, std::size_t, TrialKeyHash> index_;
};

/// Immutable in-memory answer key plus (optionally) the enrollment model
/// definitions. Safe to share read-only between threads.
class TrialSetManifest {
 public:
  TrialSetManifest() = default;
  /// Throws Error on an empty trial set, a duplicate trial or a duplicate
  /// model id.
  explicit TrialSetManifest(std::vector<Trial> trials,
                            std::vector<EnrollmentModel> models = {});

  const std::vector<Trial> &trials() const { return trials_; }
  const std::vector<EnrollmentModel> &models() const { return models_; }
  const EnrollmentModel *FindModel(const std::string &model_id) const;

  const CellCounts &Count(Subset subset, ConditionCell cell) const {
    return counts_[static_cast<std::size_t>(subset)][cell.Index()];
  }
  CellCounts Count(Source source, Subset subset) const;
  CellCounts Count(Subset subset) const;

  TrialList BlindList() const;

 private:
  std::vector<Trial> trials_;
  std::vector<EnrollmentModel> models_;
  std::unordered_map<std::string, std::size_t> model_index_;
  std::array<std::array<CellCounts, kNumCells>, 2> counts_{};
};

// File formats. All are UTF-8, tab-separated, LF, with a header row.
inline constexpr std::array<const char *, 10> kKeyColumns = {
    "modelid", "segmentid", "targettype", "source",   "subset",
    "gender",  "n_enroll",  "phone_match", "language", "duration_s"};

/// Reads key.tsv (columns in any order) and optionally models.tsv.
TrialSetManifest ReadTrials(std::istream &key, std::istream *models = nullptr);
TrialSetManifest LoadTrials(const std::string &key_path,
                            const std::string &models_path = "");
std::vector<EnrollmentModel> ReadModels(std::istream &is);
TrialList ReadTrialList(std::istream &is);
TrialList LoadTrialList(const std::string &path);

/// Canonical form: fixed column order, shortest round-trip numbers, LF.
void WriteKey(const TrialSetManifest &manifest, std::ostream &os);
void WriteModels(const std::vector<EnrollmentModel> &models, std::ostream &os);
void WriteTrialList(const TrialList &list, std::ostream &os);

/// Trial indices per condition cell, optionally restricted to one subset.
using CellPartition = std::array<std::vector<std::size_t>, kNumCells>;
CellPartition Partition(const TrialSetManifest &manifest,
                        std::optional<Subset> subset = std::nullopt);

enum class Severity { kError, kWarning };

struct Violation {
  Severity severity = Severity::kError;
  std::string rule;     // e.g. "cross-gender"
  std::string subject;  // "model\tsegment" for trials, model id for models
  std::string detail;
};

struct ConditionReport {
  std::vector<Violation> violations;

  std::size_t ErrorCount() const;
  std::size_t WarningCount() const;
  bool Clean() const { return ErrorCount() == 0; }
};

/// Checks the trial-level rules: no cross-gender or cross-lingual trials,
/// phone match unknown only for MLS, single-phone multi-segment enrollment,
/// enrollment count agreement with the model definition. Unknown language
/// codes are reported as warnings.
ConditionReport CheckConditions(const TrialSetManifest &manifest);

bool IsKnownLanguage(std::string_view code);

/// Reporting bucket for a duration: floor to the decade, 10..60.
int DurationBucket(double seconds);

}  // namespace sreval

#endif  // SREVAL_TRIALSET_H_
