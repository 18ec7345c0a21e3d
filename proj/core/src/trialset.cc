// core/src/trialset.cc

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

#include "sreval/trialset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <unordered_set>

#include "sreval/tsv.h"

namespace sreval {

namespace {

// CMN2 is Tunisian Arabic; the rest are the MLS language inventory.
constexpr std::array<std::string_view, 21> kKnownLanguages = {
    "ara-aeb", "ara-arz", "ara-acm", "ara-apc", "ara-ary", "ara-arb",
    "zho-cmn", "zho-nan", "zho-wuu", "zho-yue", "eng-gbr", "eng-usg",
    "eng-sas", "qsl-pol", "qsl-rus", "por-brz", "spa-car", "spa-eur",
    "spa-lac", "fre-hat", "fre-waf"};

void CheckId(std::string_view tok, const char *what, std::size_t line) {
  if (tok.empty())
    throw ParseError(std::string("empty ") + what, line);
  if (tok.find_first_of(" \t\v\f") != std::string_view::npos)
    throw ParseError(std::string("whitespace in ") + what + " '" +
                         std::string(tok) + "'",
                     line);
}

template <typename E>
E ParseEnum(std::string_view tok, const char *column, std::size_t line) {
  E value{};
  if (!FromToken(tok, &value))
    throw ParseError("unknown " + std::string(column) + " token '" +
                         std::string(tok) + "'",
                     line);
  return value;
}

std::string PairName(const TrialKey &k) {
  return "(" + k.model_id + ", " + k.segment_id + ")";
}

}  // namespace

std::size_t TrialKeyHash::operator()(const TrialKey &k) const {
  std::size_t h = std::hash<std::string>()(k.model_id);
  return h ^ (std::hash<std::string>()(k.segment_id) + 0x9e3779b97f4a7c15ULL +
              (h << 6) + (h >> 2));
}

TrialList::TrialList(std::vector<TrialKey> keys) : keys_(std::move(keys)) {
  index_.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!index_.emplace(keys_[i], i).second)
      throw Error("duplicate trial " + PairName(keys_[i]));
  }
}

std::optional<std::size_t> TrialList::Find(const TrialKey &key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TrialSetManifest::TrialSetManifest(std::vector<Trial> trials,
                                   std::vector<EnrollmentModel> models)
    : trials_(std::move(trials)), models_(std::move(models)) {
  if (trials_.empty()) throw Error("empty trial set");
  std::unordered_set<TrialKey, TrialKeyHash> seen;
  seen.reserve(trials_.size());
  for (const Trial &t : trials_) {
    if (!seen.insert(t.Key()).second)
      throw Error("duplicate trial " + PairName(t.Key()));
    CellCounts &c = counts_[static_cast<std::size_t>(t.subset)][t.Cell().Index()];
    if (t.label == Label::kTarget)
      ++c.n_target;
    else
      ++c.n_nontarget;
  }
  for (std::size_t i = 0; i < models_.size(); ++i) {
    if (!model_index_.emplace(models_[i].model_id, i).second)
      throw Error("duplicate model " + models_[i].model_id);
  }
}

const EnrollmentModel *TrialSetManifest::FindModel(
    const std::string &model_id) const {
  auto it = model_index_.find(model_id);
  return it == model_index_.end() ? nullptr : &models_[it->second];
}

CellCounts TrialSetManifest::Count(Source source, Subset subset) const {
  CellCounts total;
  for (std::size_t i = 0; i < kNumCells; ++i)
    if (ConditionCell::FromIndex(i).source == source)
      total += counts_[static_cast<std::size_t>(subset)][i];
  return total;
}

CellCounts TrialSetManifest::Count(Subset subset) const {
  CellCounts total;
  for (const CellCounts &c : counts_[static_cast<std::size_t>(subset)])
    total += c;
  return total;
}

TrialList TrialSetManifest::BlindList() const {
  std::vector<TrialKey> keys;
  keys.reserve(trials_.size());
  for (const Trial &t : trials_) keys.push_back(t.Key());
  return TrialList(std::move(keys));
}

TrialSetManifest ReadTrials(std::istream &key, std::istream *models) {
  TsvReader reader(key);
  std::vector<std::string_view> f;
  if (!reader.Next(&f)) throw ParseError("missing header row");

  // Column permutation: pos[c] is the file column holding canonical column c.
  std::array<std::size_t, kKeyColumns.size()> pos;
  pos.fill(SIZE_MAX);
  if (f.size() != kKeyColumns.size())
    throw ParseError("key header must have " +
                         std::to_string(kKeyColumns.size()) + " columns, got " +
                         std::to_string(f.size()),
                     1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto it = std::find(kKeyColumns.begin(), kKeyColumns.end(), f[i]);
    if (it == kKeyColumns.end())
      throw ParseError("unknown key column '" + std::string(f[i]) + "'", 1);
    std::size_t c = it - kKeyColumns.begin();
    if (pos[c] != SIZE_MAX)
      throw ParseError("repeated key column '" + std::string(f[i]) + "'", 1);
    pos[c] = i;
  }

  std::vector<Trial> trials;
  std::unordered_map<TrialKey, std::size_t, TrialKeyHash> first_line;
  while (reader.Next(&f)) {
    const std::size_t line = reader.line();
    if (f.size() != kKeyColumns.size())
      throw ParseError("expected " + std::to_string(kKeyColumns.size()) +
                           " columns, got " + std::to_string(f.size()),
                       line);
    Trial t;
    CheckId(f[pos[0]], "model id", line);
    CheckId(f[pos[1]], "segment id", line);
    t.model_id = f[pos[0]];
    t.segment_id = f[pos[1]];
    t.label = ParseEnum<Label>(f[pos[2]], "targettype", line);
    t.source = ParseEnum<Source>(f[pos[3]], "source", line);
    t.subset = ParseEnum<Subset>(f[pos[4]], "subset", line);
    t.gender = ParseEnum<Gender>(f[pos[5]], "gender", line);
    if (f[pos[6]] == "1")
      t.n_enroll = 1;
    else if (f[pos[6]] == "3")
      t.n_enroll = 3;
    else
      throw ParseError("unknown n_enroll token '" + std::string(f[pos[6]]) +
                           "'",
                       line);
    t.phone_match = ParseEnum<PhoneMatch>(f[pos[7]], "phone_match", line);
    CheckId(f[pos[8]], "language", line);
    t.language = f[pos[8]];
    if (ParseDouble(f[pos[9]], &t.duration_s) != NumberStatus::kOk ||
        !std::isfinite(t.duration_s))
      throw ParseError("bad duration_s '" + std::string(f[pos[9]]) + "'", line);
    if (t.duration_s < 10.0 || t.duration_s > 60.0)
      throw ParseError("duration_s " + std::string(f[pos[9]]) +
                           " outside [10, 60]",
                       line);
    auto [it, fresh] = first_line.emplace(t.Key(), line);
    if (!fresh)
      throw ParseError("duplicate trial " + PairName(t.Key()) +
                           " (first seen on line " +
                           std::to_string(it->second) + ")",
                       line);
    trials.push_back(std::move(t));
  }
  if (trials.empty()) throw ParseError("empty trial set");
  first_line.clear();

  std::vector<EnrollmentModel> model_defs;
  if (models != nullptr) model_defs = ReadModels(*models);
  try {
    return TrialSetManifest(std::move(trials), std::move(model_defs));
  } catch (const ParseError &) {
    throw;
  } catch (const Error &e) {
    throw ParseError(e.what());
  }
}

TrialSetManifest LoadTrials(const std::string &key_path,
                            const std::string &models_path) {
  std::ifstream key(key_path);
  if (!key) throw ParseError("cannot open " + key_path);
  if (models_path.empty()) return ReadTrials(key);
  std::ifstream models(models_path);
  if (!models) throw ParseError("cannot open " + models_path);
  return ReadTrials(key, &models);
}

std::vector<EnrollmentModel> ReadModels(std::istream &is) {
  TsvReader reader(is);
  std::vector<std::string_view> f;
  if (!reader.Next(&f)) throw ParseError("missing models header row");
  const std::vector<std::string_view> header = {"modelid", "speakerid",
                                                "gender", "phoneid",
                                                "segmentids"};
  if (f != header)
    throw ParseError(
        "models header must be modelid, speakerid, gender, phoneid, segmentids",
        1);
  std::vector<EnrollmentModel> out;
  std::set<std::string> ids;
  std::vector<std::string_view> parts;
  while (reader.Next(&f)) {
    const std::size_t line = reader.line();
    if (f.size() != header.size())
      throw ParseError("expected 5 columns, got " + std::to_string(f.size()),
                       line);
    EnrollmentModel m;
    CheckId(f[0], "model id", line);
    CheckId(f[1], "speaker id", line);
    m.model_id = f[0];
    m.speaker_id = f[1];
    m.gender = ParseEnum<Gender>(f[2], "gender", line);
    SplitOn(f[4], ',', &parts);
    for (auto p : parts) {
      CheckId(p, "segment id", line);
      m.segments.emplace_back(p);
    }
    if (m.segments.size() != 1 && m.segments.size() != 3)
      throw ParseError("enrollment model must have 1 or 3 segments, got " +
                           std::to_string(m.segments.size()),
                       line);
    SplitOn(f[3], ',', &parts);
    for (auto p : parts) {
      CheckId(p, "phone id", line);
      m.phone_ids.emplace_back(p);
    }
    if (m.phone_ids.size() != 1 && m.phone_ids.size() != m.segments.size())
      throw ParseError("phoneid must be one id or one per segment", line);
    if (!ids.insert(m.model_id).second)
      throw ParseError("duplicate model " + m.model_id, line);
    out.push_back(std::move(m));
  }
  return out;
}

TrialList ReadTrialList(std::istream &is) {
  TsvReader reader(is);
  std::vector<std::string_view> f;
  if (!reader.Next(&f)) throw ParseError("missing header row");
  if (f.size() != 2 || f[0] != "modelid" || f[1] != "segmentid")
    throw ParseError("trial list header must be modelid, segmentid", 1);
  std::vector<TrialKey> keys;
  std::unordered_map<TrialKey, std::size_t, TrialKeyHash> first_line;
  while (reader.Next(&f)) {
    const std::size_t line = reader.line();
    if (f.size() != 2)
      throw ParseError("expected 2 columns, got " + std::to_string(f.size()),
                       line);
    CheckId(f[0], "model id", line);
    CheckId(f[1], "segment id", line);
    TrialKey k{std::string(f[0]), std::string(f[1])};
    auto [it, fresh] = first_line.emplace(k, line);
    if (!fresh)
      throw ParseError("duplicate trial " + PairName(k) +
                           " (first seen on line " +
                           std::to_string(it->second) + ")",
                       line);
    keys.push_back(std::move(k));
  }
  if (keys.empty()) throw ParseError("empty trial set");
  return TrialList(std::move(keys));
}

TrialList LoadTrialList(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  return ReadTrialList(is);
}

void WriteKey(const TrialSetManifest &manifest, std::ostream &os) {
  for (std::size_t i = 0; i < kKeyColumns.size(); ++i)
    os << (i ? "\t" : "") << kKeyColumns[i];
  os << '\n';
  for (const Trial &t : manifest.trials()) {
    os << t.model_id << '\t' << t.segment_id << '\t' << ToToken(t.label)
       << '\t' << ToToken(t.source) << '\t' << ToToken(t.subset) << '\t'
       << ToToken(t.gender) << '\t' << t.n_enroll << '\t'
       << ToToken(t.phone_match) << '\t' << t.language << '\t'
       << FormatDouble(t.duration_s) << '\n';
  }
}

void WriteModels(const std::vector<EnrollmentModel> &models, std::ostream &os) {
  os << "modelid\tspeakerid\tgender\tphoneid\tsegmentids\n";
  auto join = [&os](const std::vector<std::string> &v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  };
  for (const EnrollmentModel &m : models) {
    os << m.model_id << '\t' << m.speaker_id << '\t' << ToToken(m.gender)
       << '\t';
    join(m.phone_ids);
    os << '\t';
    join(m.segments);
    os << '\n';
  }
}

void WriteTrialList(const TrialList &list, std::ostream &os) {
  os << "modelid\tsegmentid\n";
  for (const TrialKey &k : list.keys())
    os << k.model_id << '\t' << k.segment_id << '\n';
}

CellPartition Partition(const TrialSetManifest &manifest,
                        std::optional<Subset> subset) {
  CellPartition cells;
  const auto &trials = manifest.trials();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (subset && trials[i].subset != *subset) continue;
    cells[trials[i].Cell().Index()].push_back(i);
  }
  return cells;
}

std::size_t ConditionReport::ErrorCount() const {
  return std::count_if(violations.begin(), violations.end(),
                       [](const Violation &v) {
                         return v.severity == Severity::kError;
                       });
}

std::size_t ConditionReport::WarningCount() const {
  return violations.size() - ErrorCount();
}

ConditionReport CheckConditions(const TrialSetManifest &manifest) {
  ConditionReport report;
  const auto &trials = manifest.trials();
  auto trial_subject = [](const Trial &t) {
    return t.model_id + "\t" + t.segment_id;
  };

  // Per-model reference gender and language. With a models file the gender
  // comes from the definition; otherwise both are the majority over the
  // model's trials (first seen wins ties).
  struct Tally {
    std::map<Gender, std::size_t> gender;
    std::map<std::string, std::size_t> language;
    std::vector<Gender> gender_order;
    std::vector<std::string> language_order;
  };
  std::unordered_map<std::string, Tally> tallies;
  for (const Trial &t : trials) {
    Tally &tl = tallies[t.model_id];
    if (tl.gender[t.gender]++ == 0) tl.gender_order.push_back(t.gender);
    if (tl.language[t.language]++ == 0) tl.language_order.push_back(t.language);
  }
  auto majority = [](const auto &counts, const auto &order) {
    auto best = order.front();
    for (const auto &k : order)
      if (counts.at(k) > counts.at(best)) best = k;
    return best;
  };

  const bool have_models = !manifest.models().empty();
  std::set<std::string> unknown_languages;
  for (const Trial &t : trials) {
    const Tally &tl = tallies.at(t.model_id);
    const EnrollmentModel *model =
        have_models ? manifest.FindModel(t.model_id) : nullptr;
    if (have_models && model == nullptr) {
      report.violations.push_back({Severity::kError, "unknown-model",
                                   trial_subject(t),
                                   "model not defined in models file"});
    }
    const Gender model_gender =
        model ? model->gender : majority(tl.gender, tl.gender_order);
    if (t.gender != model_gender) {
      report.violations.push_back(
          {Severity::kError, "cross-gender", trial_subject(t),
           "test segment is " + std::string(ToToken(t.gender)) +
               ", model is " + std::string(ToToken(model_gender))});
    }
    const std::string &model_lang = majority(tl.language, tl.language_order);
    if (t.language != model_lang) {
      report.violations.push_back({Severity::kError, "cross-lingual",
                                   trial_subject(t),
                                   "test segment is " + t.language +
                                       ", model is " + model_lang});
    }
    if (t.phone_match == PhoneMatch::kUnknown && t.source != Source::kMls) {
      report.violations.push_back(
          {Severity::kError, "phone-match-unknown", trial_subject(t),
           "phone_match may be unknown only for mls trials"});
    }
    if (model && static_cast<std::size_t>(t.n_enroll) != model->segments.size()) {
      report.violations.push_back(
          {Severity::kError, "enrollment-count-mismatch", trial_subject(t),
           "trial says " + std::to_string(t.n_enroll) + " segments, model has " +
               std::to_string(model->segments.size())});
    }
    if (!IsKnownLanguage(t.language)) unknown_languages.insert(t.language);
  }

  for (const EnrollmentModel &m : manifest.models()) {
    std::set<std::string> phones(m.phone_ids.begin(), m.phone_ids.end());
    if (phones.size() > 1) {
      std::string list;
      for (const auto &p : phones) list += (list.empty() ? "" : ",") + p;
      report.violations.push_back({Severity::kError,
                                   "enrollment-phone-mismatch", m.model_id,
                                   "segments span phone ids " + list});
    }
  }
  for (const std::string &lang : unknown_languages) {
    report.violations.push_back({Severity::kWarning, "unknown-language", lang,
                                 "language code not in the known inventory"});
  }
  return report;
}

bool IsKnownLanguage(std::string_view code) {
  return std::find(kKnownLanguages.begin(), kKnownLanguages.end(), code) !=
         kKnownLanguages.end();
}

int DurationBucket(double seconds) {
  int bucket = static_cast<int>(std::floor(seconds / 10.0)) * 10;
  return std::clamp(bucket, 10, 60);
}

}  // namespace sreval
