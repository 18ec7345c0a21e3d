// core/src/bootstrap.cc

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

#include "sreval/bootstrap.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

namespace sreval {

namespace {

// A trial reduced to what the actual cost needs.
struct TrialOutcome {
  std::uint8_t cell;
  bool is_target;
  bool is_error;  // miss for targets, false alarm for nontargets
};

struct ModelTrials {
  std::vector<TrialOutcome> trials;
  std::vector<std::pair<std::size_t, CellTally>> tallies;  // sparse per cell
};

void Add(CellTallies *t, const TrialOutcome &o) {
  CellTally &c = (*t)[o.cell];
  if (o.is_target) {
    ++c.n_target;
    c.n_miss += o.is_error;
  } else {
    ++c.n_nontarget;
    c.n_fa += o.is_error;
  }
}

bool CoversRequired(const CellTallies &t, const std::vector<std::size_t> &required) {
  for (std::size_t c : required)
    if (t[c].n_target == 0 || t[c].n_nontarget == 0) return false;
  return true;
}

}  // namespace

double QuantileType7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw MetricError("quantile of empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

CiResult BootstrapCost(std::span<const double> llr,
                       const TrialSetManifest &manifest,
                       const CostParams &params, const BootstrapConfig &config,
                       const AggregateOptions &options) {
  if (config.n_resamples < 1)
    throw ConfigError("bootstrap needs at least one resample");
  if (!(config.level > 0.0 && config.level < 1.0))
    throw ConfigError("confidence level must lie strictly between 0 and 1");
  const auto &trials = manifest.trials();
  if (llr.size() != trials.size())
    throw MetricError("score vector does not match the trial set");

  // Group outcomes by enrollment model, in order of first appearance.
  const double theta = params.theta_actual();
  std::vector<ModelTrials> models;
  std::unordered_map<std::string, std::size_t> model_index;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const Trial &t = trials[i];
    if (options.subset && t.subset != *options.subset) continue;
    auto [it, fresh] = model_index.emplace(t.model_id, models.size());
    if (fresh) models.emplace_back();
    const bool target = t.label == Label::kTarget;
    models[it->second].trials.push_back(
        {static_cast<std::uint8_t>(t.Cell().Index()), target,
         target ? llr[i] < theta : llr[i] >= theta});
  }
  if (models.size() < 2)
    throw MetricError("bootstrap needs at least two distinct enrollment models");
  CellTallies original{};
  for (ModelTrials &m : models) {
    CellTallies t{};
    for (const TrialOutcome &o : m.trials) Add(&t, o);
    for (std::size_t c = 0; c < kNumCells; ++c) {
      if (t[c].n_target + t[c].n_nontarget > 0) m.tallies.push_back({c, t[c]});
      original[c] += t[c];
    }
  }

  CiResult result;
  result.n_models = models.size();
  result.point = AggregateFromTallies(original, params, options).final;
  std::vector<std::size_t> required;
  for (std::size_t c = 0; c < kNumCells; ++c)
    if (original[c].n_target > 0 && original[c].n_nontarget > 0)
      required.push_back(c);

  const std::size_t n = config.n_resamples;
  const std::size_t max_draws = 10 * n;
  result.resample_costs.assign(n, 0.0);
  std::vector<std::size_t> attempts(n, 0);
  std::vector<char> covered(n, 0);

  auto run_one = [&](std::size_t r) {
    Rng rng = Rng::ForStream(config.seed, r);
    CellTallies t;
    do {
      ++attempts[r];
      t = CellTallies{};
      for (std::size_t k = 0; k < models.size(); ++k) {
        const ModelTrials &m = models[rng.Below(models.size())];
        if (config.two_level) {
          for (std::size_t j = 0; j < m.trials.size(); ++j)
            Add(&t, m.trials[rng.Below(m.trials.size())]);
        } else {
          for (const auto &[c, tally] : m.tallies) t[c] += tally;
        }
      }
    } while (!CoversRequired(t, required) && attempts[r] < max_draws);
    if (CoversRequired(t, required)) {
      covered[r] = 1;
      result.resample_costs[r] = AggregateFromTallies(t, params, options).final;
    }
  };

  const unsigned threads = std::max(1u, config.threads);
  if (threads == 1) {
    for (std::size_t r = 0; r < n; ++r) run_one(r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < n; r += threads) run_one(r);
      });
  }

  for (std::size_t a : attempts) result.total_draws += a;
  if (result.total_draws > max_draws ||
      std::count(covered.begin(), covered.end(), 0) > 0)
    throw MetricError("bootstrap aborted: " + std::to_string(result.total_draws) +
                      " draws needed for " + std::to_string(n) +
                      " usable resamples");

  std::vector<double> sorted = result.resample_costs;
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - config.level) / 2.0;
  result.lo = QuantileType7(sorted, tail);
  result.hi = QuantileType7(sorted, 1.0 - tail);
  return result;
}

}  // namespace sreval
