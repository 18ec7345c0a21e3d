// benchmarks/sreval_bench.cc

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

#include <vector>

#include <benchmark/benchmark.h>

#include "sreval/backend.h"
#include "sreval/bootstrap.h"
#include "sreval/det.h"
#include "sreval/metrics.h"
#include "sreval/random.h"
#include "sreval/synth.h"

namespace sreval {
namespace {

std::vector<ScoredTrial> RandomTrials(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ScoredTrial> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i].is_target = i % 20 == 0;
    t[i].llr = rng.Normal() + (t[i].is_target ? 3.0 : -1.0);
  }
  return t;
}

void BM_MinCost(benchmark::State &state) {
  const auto trials = RandomTrials(static_cast<std::size_t>(state.range(0)), 1);
  const CostParams params;
  for (auto _ : state) benchmark::DoNotOptimize(MinCost(trials, params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MinCost)->RangeMultiplier(10)->Range(1000, 1000000);

void BM_DetPoints(benchmark::State &state) {
  const auto trials = RandomTrials(static_cast<std::size_t>(state.range(0)), 2);
  const CostParams params;
  for (auto _ : state) benchmark::DoNotOptimize(DetPoints(trials, params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DetPoints)->RangeMultiplier(10)->Range(1000, 100000);

void BM_PldaScore(benchmark::State &state) {
  const Eigen::Index d = state.range(0);
  Rng rng(3);
  Matrix a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.Normal();
  const PldaModel model{Vector::Zero(d), a * a.transpose() / d + Matrix::Identity(d, d),
                        Matrix::Identity(d, d)};
  const PldaScorer scorer(model);
  Vector e(d), t(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    e(i) = rng.Normal();
    t(i) = rng.Normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(scorer.Score(e, t));
}
BENCHMARK(BM_PldaScore)->Arg(32)->Arg(150)->Arg(250);

PopulationSpec BootstrapPopulation() {
  PopulationSpec spec;
  spec.dim = 8;
  spec.segments_per_speaker = 12;
  spec.seed = 5;
  spec.between.kind = CovSpec::Kind::kGeometric;
  spec.between.scale = 10.0;
  spec.between.ratio = 0.8;
  for (Source source : kAllSources)
    spec.plan.push_back({source, Subset::kProgress, 1000, 4000, 0.5, 50, 50,
                         {source == Source::kCmn2 ? "ara-aeb" : "eng-usg"}});
  return spec;
}

void BM_Bootstrap(benchmark::State &state) {
  static const SynthOutput out = Generate(BootstrapPopulation());
  BootstrapConfig cfg;
  cfg.n_resamples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(BootstrapCost(out.oracle_llr, out.manifest, CostParams(), cfg));
}
BENCHMARK(BM_Bootstrap)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sreval

BENCHMARK_MAIN();
