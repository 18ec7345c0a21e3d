// sreval/bootstrap.h

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

#ifndef SREVAL_BOOTSTRAP_H_
#define SREVAL_BOOTSTRAP_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sreval/metrics.h"
#include "sreval/random.h"

namespace sreval {

struct BootstrapConfig {
  std::size_t n_resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 20201;
  /// Also resample each drawn model's trials with replacement.
  bool two_level = false;
  /// Worker threads. Results do not depend on this: resample i always uses
  /// the stream derived from (seed, i).
  unsigned threads = 1;
};

struct CiResult {
  double point = 0.0;  // aggregate actual cost on the original data
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> resample_costs;  // in resample-index order
  std::size_t n_models = 0;
  std::size_t total_draws = 0;  // including redrawn degenerate resamples
  std::string generator = Rng::kGeneratorName;
  std::string quantile_rule = "type-7 (linear interpolation)";
};

/**
   Bootstrap interval for the aggregate actual cost. Each resample draws as
   many enrollment models as there are distinct models, with replacement; a
   model drawn k times contributes each of its trials k times. A resample in
   which a cell that is scorable on the original data loses all its targets
   or nontargets is redrawn. Throws MetricError with fewer than two models,
   or when more than 10 * n_resamples draws are needed in total.
 */
CiResult BootstrapCost(std::span<const double> llr,
                       const TrialSetManifest &manifest,
                       const CostParams &params, const BootstrapConfig &config,
                       const AggregateOptions &options = {});

/// Hyndman-Fan type 7 quantile of sorted data.
double QuantileType7(std::span<const double> sorted, double p);

}  // namespace sreval

#endif  // SREVAL_BOOTSTRAP_H_
