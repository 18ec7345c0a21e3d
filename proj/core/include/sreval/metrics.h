// sreval/metrics.h

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

#ifndef SREVAL_METRICS_H_
#define SREVAL_METRICS_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sreval/common.h"
#include "sreval/trialset.h"

namespace sreval {

/**
   Detection cost parameters. The normalized cost at threshold theta is

     C_norm(theta) = P_miss(theta) + beta * P_fa(theta),
     beta = (C_fa / C_miss) * (1 - P_target) / P_target,

   and the actual cost is C_norm evaluated at theta = ln(beta), the Bayes
   decision threshold for calibrated natural-log likelihood ratios.
   With the defaults (1, 1, 0.05) beta is exactly 19.
 */
class CostParams {
 public:
  CostParams() : CostParams(1.0, 1.0, 0.05) {}
  /// Throws ConfigError unless c_miss, c_fa > 0 and 0 < p_target < 1.
  CostParams(double c_miss, double c_fa, double p_target);

  double c_miss() const { return c_miss_; }
  double c_fa() const { return c_fa_; }
  double p_target() const { return p_target_; }
  double beta() const { return beta_; }
  double theta_actual() const { return theta_; }

 private:
  double c_miss_, c_fa_, p_target_, beta_, theta_;
};

struct ScoredTrial {
  double llr = 0.0;
  bool is_target = false;
};

/// Accept rule used everywhere: a trial is accepted iff llr >= theta.
struct ErrorRates {
  double p_miss = 0.0;
  double p_fa = 0.0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  std::size_t n_miss = 0;
  std::size_t n_fa = 0;
};

/// Throws MetricError("undefined error rate: no target trials") (or
/// nontarget) when a class is empty.
ErrorRates ComputeErrorRates(std::span<const ScoredTrial> trials, double theta);

struct CostResult {
  double p_miss = 0.0;
  double p_fa = 0.0;
  double c_norm = 0.0;
  double theta = 0.0;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
};

CostResult CostAt(std::span<const ScoredTrial> trials, const CostParams &params,
                  double theta);
/// Cost at theta = ln(beta).
CostResult ActualCost(std::span<const ScoredTrial> trials,
                      const CostParams &params);

/// A condition cell's trials and its share of the pooled error rates.
/// Within a group every target carries weight / n_target and every
/// nontarget weight / n_nontarget, so each group contributes the same
/// relative mass regardless of its trial count.
struct WeightedGroup {
  std::span<const ScoredTrial> trials;
  double weight = 1.0;
  std::string_view name;  // used in error messages
};

struct OperatingPoint {
  double theta = 0.0;
  double p_miss = 0.0;
  double p_fa = 0.0;
  double c_norm = 0.0;
};

/// Weighted pooled rates at a single threshold. Weights are normalized to
/// sum to one over the groups.
OperatingPoint RatesAt(std::span<const WeightedGroup> groups,
                       const CostParams &params, double theta);

/// Every candidate threshold in increasing order: -inf, the midpoints of
/// adjacent distinct scores, +inf. One point per threshold.
std::vector<OperatingPoint> SweepThresholds(
    std::span<const WeightedGroup> groups, const CostParams &params);

struct MinCostResult {
  double c_norm = 0.0;
  double theta = 0.0;  // smallest minimizing candidate threshold
  double p_miss = 0.0;
  double p_fa = 0.0;
};

/// Minimum of the pooled, equalized cost over one shared threshold.
/// Throws MetricError if any group lacks targets or nontargets.
MinCostResult MinCost(std::span<const WeightedGroup> groups,
                      const CostParams &params);
MinCostResult MinCost(std::span<const ScoredTrial> trials,
                      const CostParams &params);

/// Relative weight of each condition cell inside its source.
class CellWeights {
 public:
  /// Equal weight for the four cells of each source.
  static CellWeights Uniform();
  /// Reads a table `source gender n_enroll weight` with one row per cell.
  static CellWeights Load(const std::string &path);

  double operator[](std::size_t cell) const { return w_[cell]; }
  void Set(std::size_t cell, double w);

 private:
  std::array<double, kNumCells> w_{};
};

struct AggregateOptions {
  CellWeights weights = CellWeights::Uniform();
  /// Skip cells without both classes (with a warning) instead of failing.
  bool partial = false;
  /// Restrict to one subset; nullopt scores every trial.
  std::optional<Subset> subset;
};

struct CellTally {
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  std::size_t n_miss = 0;
  std::size_t n_fa = 0;

  CellTally &operator+=(const CellTally &o) {
    n_target += o.n_target;
    n_nontarget += o.n_nontarget;
    n_miss += o.n_miss;
    n_fa += o.n_fa;
    return *this;
  }
};
using CellTallies = std::array<CellTally, kNumCells>;

struct AggregateCost {
  std::array<std::optional<CostResult>, kNumCells> per_cell;
  std::array<std::optional<double>, 2> per_source;  // indexed by Source
  double final = 0.0;
  std::vector<std::string> warnings;
};

/// Error counts per cell at the actual threshold.
CellTallies TallyActual(std::span<const double> llr,
                        const TrialSetManifest &manifest,
                        const CostParams &params,
                        std::optional<Subset> subset = std::nullopt);

/// Per-cell actual costs, weighted per-source costs, and their mean.
/// Throws MetricError listing the empty cells unless options.partial.
AggregateCost AggregateFromTallies(const CellTallies &tallies,
                                   const CostParams &params,
                                   const AggregateOptions &options);

/// `llr` is aligned with manifest.trials().
AggregateCost AggregateActual(std::span<const double> llr,
                              const TrialSetManifest &manifest,
                              const CostParams &params,
                              const AggregateOptions &options = {});

struct AggregateMinCost {
  std::array<std::optional<MinCostResult>, 2> per_source;
  double final = 0.0;
  std::vector<std::string> warnings;
};

/// One equalized minimum per source, then their mean.
AggregateMinCost AggregateMin(std::span<const double> llr,
                              const TrialSetManifest &manifest,
                              const CostParams &params,
                              const AggregateOptions &options = {});

/// Scored trials for each cell, in manifest order within a cell.
std::array<std::vector<ScoredTrial>, kNumCells> GroupByCell(
    std::span<const double> llr, const TrialSetManifest &manifest,
    std::optional<Subset> subset = std::nullopt);

}  // namespace sreval

#endif  // SREVAL_METRICS_H_
