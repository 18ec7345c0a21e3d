// core/src/submission.cc

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

#include "sreval/submission.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sreval/tsv.h"

namespace sreval {

std::string ValidationReport::Summary() const {
  if (accepted()) return "accepted";
  std::string out = "rejected:";
  if (n_missing) out += " " + std::to_string(n_missing) + " missing trial(s)";
  if (n_missing && n_extra) out += ",";
  if (n_extra) out += " " + std::to_string(n_extra) + " extra trial(s)";
  return out;
}

RawScores ParseScores(std::istream &is) {
  TsvReader reader(is);
  std::vector<std::string_view> f;
  if (!reader.Next(&f)) throw ParseError("missing header row");
  if (f.size() != 3 || f[0] != "modelid" || f[1] != "segmentid" ||
      f[2] != "LLR")
    throw ParseError("score header must be modelid, segmentid, LLR", 1);

  RawScores scores;
  std::unordered_map<TrialKey, std::size_t, TrialKeyHash> first_line;
  while (reader.Next(&f)) {
    const std::size_t line = reader.line();
    if (f.size() != 3)
      throw ParseError("expected 3 columns, got " + std::to_string(f.size()),
                       line);
    if (f[0].empty() || f[1].empty())
      throw ParseError("empty model or segment id", line);
    double v = 0.0;
    switch (ParseDouble(f[2], &v)) {
      case NumberStatus::kOk:
        break;
      case NumberStatus::kOutOfRange:
        throw ParseError("non-finite LLR at line " + std::to_string(line) +
                             " (out of range: " + std::string(f[2]) + ")",
                         line);
      case NumberStatus::kInvalid:
        throw ParseError("non-numeric LLR '" + std::string(f[2]) + "'", line);
    }
    if (!std::isfinite(v))
      throw ParseError("non-finite LLR at line " + std::to_string(line), line);
    TrialKey key{std::string(f[0]), std::string(f[1])};
    auto [it, fresh] = first_line.emplace(key, line);
    if (!fresh)
      throw ParseError("duplicate trial (" + key.model_id + ", " +
                           key.segment_id + "), first seen on line " +
                           std::to_string(it->second),
                       line);
    scores.emplace(std::move(key), v);
  }
  return scores;
}

RawScores LoadScores(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  return ParseScores(is);
}

ValidationResult Validate(const RawScores &scores, const TrialList &list,
                          std::string team_id,
                          std::chrono::system_clock::time_point received_at) {
  ValidationResult result;
  ValidationReport &rep = result.report;
  std::vector<double> llr(list.size());
  std::size_t found = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    auto it = scores.find(list.keys()[i]);
    if (it == scores.end()) {
      if (rep.missing.size() < ValidationReport::kMaxListed)
        rep.missing.push_back(list.keys()[i]);
      ++rep.n_missing;
    } else {
      llr[i] = it->second;
      ++found;
    }
  }
  // Every key in `scores` is unique, so anything not matched is extra.
  rep.n_extra = scores.size() - found;
  if (rep.n_extra > 0) {
    std::vector<TrialKey> extra;
    for (const auto &[key, v] : scores)
      if (!list.Find(key)) extra.push_back(key);
    // Sort so the listed subset does not depend on hash order.
    std::sort(extra.begin(), extra.end(), [](const TrialKey &a, const TrialKey &b) {
      return std::tie(a.model_id, a.segment_id) <
             std::tie(b.model_id, b.segment_id);
    });
    if (extra.size() > ValidationReport::kMaxListed)
      extra.resize(ValidationReport::kMaxListed);
    rep.extra = std::move(extra);
  }
  if (rep.accepted())
    result.submission = Submission{std::move(team_id), received_at,
                                   std::move(llr)};
  return result;
}

void WriteScores(const TrialList &list, std::span<const double> llr,
                 std::ostream &os) {
  if (llr.size() != list.size())
    throw Error("score vector does not match trial list size");
  os << "modelid\tsegmentid\tLLR\n";
  for (std::size_t i = 0; i < list.size(); ++i)
    os << list.keys()[i].model_id << '\t' << list.keys()[i].segment_id << '\t'
       << FormatDouble(llr[i]) << '\n';
}

}  // namespace sreval
