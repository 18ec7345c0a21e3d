// core/src/metrics.cc

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

#include "sreval/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>

#include "sreval/tsv.h"

namespace sreval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Pooled rates from per-group integer counts. Every cost in this file goes
// through here so that equal classifications give bit-identical costs.
// Division of exact integer counts keeps the result unchanged when a group
// is replicated k times (k*m / k*n rounds to the same double as m / n).
struct Pool {
  std::vector<double> norm_weight;
  std::vector<std::size_t> n_target, n_nontarget;

  OperatingPoint Evaluate(const std::size_t *miss, const std::size_t *fa,
                          double beta, double theta) const {
    OperatingPoint p;
    p.theta = theta;
    for (std::size_t g = 0; g < norm_weight.size(); ++g) {
      p.p_miss += norm_weight[g] * (static_cast<double>(miss[g]) /
                                    static_cast<double>(n_target[g]));
      p.p_fa += norm_weight[g] * (static_cast<double>(fa[g]) /
                                  static_cast<double>(n_nontarget[g]));
    }
    p.c_norm = p.p_miss + beta * p.p_fa;
    return p;
  }
};

std::vector<double> NormalizeWeights(const std::vector<double> &w) {
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) throw MetricError("group weights must sum to a positive value");
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] / total;
  return out;
}

Pool MakePool(std::span<const WeightedGroup> groups) {
  if (groups.empty()) throw MetricError("no trial groups to score");
  Pool pool;
  std::vector<double> w;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::size_t nt = 0, nn = 0;
    for (const ScoredTrial &t : groups[g].trials) (t.is_target ? nt : nn)++;
    std::string name = groups[g].name.empty() ? "group " + std::to_string(g)
                                              : std::string(groups[g].name);
    if (nt == 0)
      throw MetricError("undefined error rate: no target trials in " + name);
    if (nn == 0)
      throw MetricError("undefined error rate: no nontarget trials in " + name);
    if (!(groups[g].weight > 0.0))
      throw MetricError("non-positive weight for " + name);
    pool.n_target.push_back(nt);
    pool.n_nontarget.push_back(nn);
    w.push_back(groups[g].weight);
  }
  pool.norm_weight = NormalizeWeights(w);
  return pool;
}

// Threshold strictly between a < b, accepting b and rejecting a.
double Between(double a, double b) {
  double m = std::midpoint(a, b);
  return m > a ? m : b;
}

// Visits every candidate threshold in increasing order.
template <typename Visit>
void Sweep(std::span<const WeightedGroup> groups, const CostParams &params,
           Visit &&visit) {
  const Pool pool = MakePool(groups);
  struct Entry {
    double llr;
    std::uint32_t group;
    bool is_target;
  };
  std::vector<Entry> entries;
  std::size_t total = 0;
  for (const auto &g : groups) total += g.trials.size();
  entries.reserve(total);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (const ScoredTrial &t : groups[g].trials)
      entries.push_back({t.llr, static_cast<std::uint32_t>(g), t.is_target});
  std::sort(entries.begin(), entries.end(),
            [](const Entry &a, const Entry &b) { return a.llr < b.llr; });

  std::vector<std::size_t> miss(groups.size(), 0);
  std::vector<std::size_t> fa(pool.n_nontarget);
  const double beta = params.beta();
  visit(pool.Evaluate(miss.data(), fa.data(), beta, -kInf));
  std::size_t i = 0;
  while (i < entries.size()) {
    const double v = entries[i].llr;
    std::size_t j = i;
    for (; j < entries.size() && entries[j].llr == v; ++j) {
      if (entries[j].is_target)
        ++miss[entries[j].group];
      else
        --fa[entries[j].group];
    }
    const double theta = j < entries.size() ? Between(v, entries[j].llr) : kInf;
    visit(pool.Evaluate(miss.data(), fa.data(), beta, theta));
    i = j;
  }
}

}  // namespace

CostParams::CostParams(double c_miss, double c_fa, double p_target)
    : c_miss_(c_miss), c_fa_(c_fa), p_target_(p_target) {
  if (!(c_miss > 0.0) || !std::isfinite(c_miss))
    throw ConfigError("c_miss must be a positive finite number");
  if (!(c_fa > 0.0) || !std::isfinite(c_fa))
    throw ConfigError("c_fa must be a positive finite number");
  if (!(p_target > 0.0 && p_target < 1.0))
    throw ConfigError("p_target must lie strictly between 0 and 1");
  // (1/p - 1) rather than (1-p)/p: exact 19 for p = 0.05.
  beta_ = (c_fa / c_miss) * (1.0 / p_target - 1.0);
  theta_ = std::log(beta_);
}

ErrorRates ComputeErrorRates(std::span<const ScoredTrial> trials,
                             double theta) {
  ErrorRates r;
  for (const ScoredTrial &t : trials) {
    if (t.is_target) {
      ++r.n_target;
      if (t.llr < theta) ++r.n_miss;
    } else {
      ++r.n_nontarget;
      if (t.llr >= theta) ++r.n_fa;
    }
  }
  if (r.n_target == 0)
    throw MetricError("undefined error rate: no target trials");
  if (r.n_nontarget == 0)
    throw MetricError("undefined error rate: no nontarget trials");
  r.p_miss = static_cast<double>(r.n_miss) / static_cast<double>(r.n_target);
  r.p_fa = static_cast<double>(r.n_fa) / static_cast<double>(r.n_nontarget);
  return r;
}

CostResult CostAt(std::span<const ScoredTrial> trials, const CostParams &params,
                  double theta) {
  const ErrorRates r = ComputeErrorRates(trials, theta);
  CostResult c;
  c.p_miss = r.p_miss;
  c.p_fa = r.p_fa;
  c.c_norm = r.p_miss + params.beta() * r.p_fa;
  c.theta = theta;
  c.n_target = r.n_target;
  c.n_nontarget = r.n_nontarget;
  return c;
}

CostResult ActualCost(std::span<const ScoredTrial> trials,
                      const CostParams &params) {
  return CostAt(trials, params, params.theta_actual());
}

OperatingPoint RatesAt(std::span<const WeightedGroup> groups,
                       const CostParams &params, double theta) {
  const Pool pool = MakePool(groups);
  std::vector<std::size_t> miss(groups.size(), 0), fa(groups.size(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const ScoredTrial &t : groups[g].trials) {
      if (t.is_target && t.llr < theta) ++miss[g];
      if (!t.is_target && t.llr >= theta) ++fa[g];
    }
  }
  return pool.Evaluate(miss.data(), fa.data(), params.beta(), theta);
}

std::vector<OperatingPoint> SweepThresholds(
    std::span<const WeightedGroup> groups, const CostParams &params) {
  std::vector<OperatingPoint> out;
  Sweep(groups, params, [&out](const OperatingPoint &p) { out.push_back(p); });
  return out;
}

MinCostResult MinCost(std::span<const WeightedGroup> groups,
                      const CostParams &params) {
  MinCostResult best;
  bool have = false;
  Sweep(groups, params, [&](const OperatingPoint &p) {
    if (!have || p.c_norm < best.c_norm) {
      best = {p.c_norm, p.theta, p.p_miss, p.p_fa};
      have = true;
    }
  });
  return best;
}

MinCostResult MinCost(std::span<const ScoredTrial> trials,
                      const CostParams &params) {
  const WeightedGroup g{trials, 1.0, "trials"};
  return MinCost(std::span<const WeightedGroup>(&g, 1), params);
}

CellWeights CellWeights::Uniform() {
  CellWeights w;
  w.w_.fill(1.0);
  return w;
}

void CellWeights::Set(std::size_t cell, double w) {
  if (cell >= kNumCells) throw ConfigError("cell index out of range");
  if (!(w > 0.0) || !std::isfinite(w))
    throw ConfigError("cell weights must be positive and finite");
  w_[cell] = w;
}

CellWeights CellWeights::Load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  TsvReader reader(is);
  std::vector<std::string_view> f;
  if (!reader.Next(&f) || f.size() != 4 || f[0] != "source" ||
      f[1] != "gender" || f[2] != "n_enroll" || f[3] != "weight")
    throw ParseError("weights header must be source, gender, n_enroll, weight",
                     1);
  CellWeights w;
  std::array<bool, kNumCells> seen{};
  while (reader.Next(&f)) {
    const std::size_t line = reader.line();
    if (f.size() != 4) throw ParseError("expected 4 columns", line);
    ConditionCell cell;
    if (!FromToken(f[0], &cell.source))
      throw ParseError("unknown source '" + std::string(f[0]) + "'", line);
    if (!FromToken(f[1], &cell.gender))
      throw ParseError("unknown gender '" + std::string(f[1]) + "'", line);
    if (f[2] == "1")
      cell.n_enroll = 1;
    else if (f[2] == "3")
      cell.n_enroll = 3;
    else
      throw ParseError("unknown n_enroll '" + std::string(f[2]) + "'", line);
    double v;
    if (ParseDouble(f[3], &v) != NumberStatus::kOk || !(v > 0.0) ||
        !std::isfinite(v))
      throw ParseError("weight must be a positive number", line);
    if (seen[cell.Index()])
      throw ParseError("duplicate weight for " + cell.Name(), line);
    seen[cell.Index()] = true;
    w.w_[cell.Index()] = v;
  }
  for (std::size_t c = 0; c < kNumCells; ++c)
    if (!seen[c])
      throw ParseError("no weight given for " + ConditionCell::FromIndex(c).Name());
  return w;
}

std::array<std::vector<ScoredTrial>, kNumCells> GroupByCell(
    std::span<const double> llr, const TrialSetManifest &manifest,
    std::optional<Subset> subset) {
  const auto &trials = manifest.trials();
  if (llr.size() != trials.size())
    throw MetricError("score vector does not match the trial set");
  std::array<std::vector<ScoredTrial>, kNumCells> cells;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (subset && trials[i].subset != *subset) continue;
    cells[trials[i].Cell().Index()].push_back(
        {llr[i], trials[i].label == Label::kTarget});
  }
  return cells;
}

CellTallies TallyActual(std::span<const double> llr,
                        const TrialSetManifest &manifest,
                        const CostParams &params,
                        std::optional<Subset> subset) {
  const auto &trials = manifest.trials();
  if (llr.size() != trials.size())
    throw MetricError("score vector does not match the trial set");
  const double theta = params.theta_actual();
  CellTallies tallies{};
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (subset && trials[i].subset != *subset) continue;
    CellTally &t = tallies[trials[i].Cell().Index()];
    if (trials[i].label == Label::kTarget) {
      ++t.n_target;
      if (llr[i] < theta) ++t.n_miss;
    } else {
      ++t.n_nontarget;
      if (llr[i] >= theta) ++t.n_fa;
    }
  }
  return tallies;
}

namespace {

// Cells of `source` that take part in aggregation; records skipped cells as
// warnings in partial mode and throws otherwise.
template <typename HasBoth>
std::vector<std::size_t> UsableCells(Source source, HasBoth has_both,
                                     const AggregateOptions &options,
                                     std::vector<std::string> *warnings,
                                     std::vector<std::string> *empty) {
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < kNumCells; ++c) {
    const ConditionCell cell = ConditionCell::FromIndex(c);
    if (cell.source != source) continue;
    if (has_both(c)) {
      cells.push_back(c);
    } else if (options.partial) {
      warnings->push_back("skipped empty cell " + cell.Name());
    } else {
      empty->push_back(cell.Name());
    }
  }
  return cells;
}

void ThrowIfEmpty(const std::vector<std::string> &empty) {
  if (empty.empty()) return;
  std::string list;
  for (const auto &n : empty) list += (list.empty() ? "" : ", ") + n;
  throw MetricError("condition cells lack target or nontarget trials: " + list);
}

double MeanOfSources(const std::array<std::optional<double>, 2> &per_source) {
  double sum = 0.0;
  int n = 0;
  for (const auto &v : per_source)
    if (v) {
      sum += *v;
      ++n;
    }
  if (n == 0) throw MetricError("no scorable condition cells");
  return sum / n;
}

}  // namespace

AggregateCost AggregateFromTallies(const CellTallies &tallies,
                                   const CostParams &params,
                                   const AggregateOptions &options) {
  AggregateCost out;
  std::vector<std::string> empty;
  const double beta = params.beta();
  for (Source source : kAllSources) {
    auto cells = UsableCells(
        source,
        [&](std::size_t c) {
          return tallies[c].n_target > 0 && tallies[c].n_nontarget > 0;
        },
        options, &out.warnings, &empty);
    if (cells.empty()) continue;
    std::vector<double> w;
    Pool pool;
    std::vector<std::size_t> miss, fa;
    for (std::size_t c : cells) {
      const CellTally &t = tallies[c];
      CostResult r;
      r.p_miss = static_cast<double>(t.n_miss) / static_cast<double>(t.n_target);
      r.p_fa = static_cast<double>(t.n_fa) / static_cast<double>(t.n_nontarget);
      r.c_norm = r.p_miss + beta * r.p_fa;
      r.theta = params.theta_actual();
      r.n_target = t.n_target;
      r.n_nontarget = t.n_nontarget;
      out.per_cell[c] = r;
      w.push_back(options.weights[c]);
      pool.n_target.push_back(t.n_target);
      pool.n_nontarget.push_back(t.n_nontarget);
      miss.push_back(t.n_miss);
      fa.push_back(t.n_fa);
    }
    pool.norm_weight = NormalizeWeights(w);
    out.per_source[static_cast<std::size_t>(source)] =
        pool.Evaluate(miss.data(), fa.data(), beta, params.theta_actual())
            .c_norm;
  }
  ThrowIfEmpty(empty);
  out.final = MeanOfSources(out.per_source);
  return out;
}

AggregateCost AggregateActual(std::span<const double> llr,
                              const TrialSetManifest &manifest,
                              const CostParams &params,
                              const AggregateOptions &options) {
  return AggregateFromTallies(
      TallyActual(llr, manifest, params, options.subset), params, options);
}

AggregateMinCost AggregateMin(std::span<const double> llr,
                              const TrialSetManifest &manifest,
                              const CostParams &params,
                              const AggregateOptions &options) {
  const auto cells = GroupByCell(llr, manifest, options.subset);
  AggregateMinCost out;
  std::vector<std::string> empty;
  std::array<std::string, kNumCells> names;
  for (std::size_t c = 0; c < kNumCells; ++c)
    names[c] = ConditionCell::FromIndex(c).Name();
  for (Source source : kAllSources) {
    auto usable = UsableCells(
        source,
        [&](std::size_t c) {
          bool t = false, n = false;
          for (const ScoredTrial &s : cells[c]) (s.is_target ? t : n) = true;
          return t && n;
        },
        options, &out.warnings, &empty);
    if (usable.empty()) continue;
    std::vector<WeightedGroup> groups;
    for (std::size_t c : usable)
      groups.push_back({cells[c], options.weights[c], names[c]});
    if (empty.empty())
      out.per_source[static_cast<std::size_t>(source)] =
          MinCost(groups, params);
  }
  ThrowIfEmpty(empty);
  std::array<std::optional<double>, 2> values;
  for (std::size_t s = 0; s < 2; ++s)
    if (out.per_source[s]) values[s] = out.per_source[s]->c_norm;
  out.final = MeanOfSources(values);
  return out;
}

}  // namespace sreval
