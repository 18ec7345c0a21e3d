// sreval/synth.h

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

#ifndef SREVAL_SYNTH_H_
#define SREVAL_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sreval/backend.h"
#include "sreval/trialset.h"

namespace sreval {

/// A covariance matrix description.
struct CovSpec {
  enum class Kind { kIdentity, kDiagonal, kGeometric };
  Kind kind = Kind::kIdentity;
  double scale = 1.0;            // kIdentity: scale * I; kGeometric: first eigenvalue
  double ratio = 0.5;            // kGeometric: eigenvalue i is scale * ratio^i
  std::vector<double> diagonal;  // kDiagonal
  bool rotate = false;           // conjugate by a seeded random rotation

  /// Throws ConfigError on a negative eigenvalue or a size mismatch.
  Matrix Build(Eigen::Index dim, std::uint64_t seed) const;
};

/// Trials to draw for one (source, subset) pair and the speakers behind them.
/// Progress and test blocks never share speakers.
struct TrialBlock {
  Source source = Source::kCmn2;
  Subset subset = Subset::kProgress;
  std::size_t n_target = 0;
  std::size_t n_nontarget = 0;
  double frac_3seg = 0.0;  // share of trials against 3-segment models
  std::size_t male_speakers = 0;
  std::size_t female_speakers = 0;
  std::vector<std::string> languages;  // assigned round-robin within gender
};

struct PopulationSpec {
  Eigen::Index dim = 32;
  std::size_t segments_per_speaker = 10;
  CovSpec between;
  CovSpec within;
  std::uint64_t seed = 1;
  std::vector<TrialBlock> plan;

  // Optional labelled training population, disjoint from the trial speakers.
  std::size_t train_speakers = 0;
  std::size_t train_segments_per_speaker = 10;
  /// Each training segment also gets a degraded copy (extra isotropic noise
  /// of this variance) with probability degraded_fraction.
  double degraded_fraction = 0.0;
  double degraded_variance = 1.0;

  std::size_t n_speakers() const;
  /// Throws ConfigError if the spec cannot be generated.
  void Check() const;
};

/// The plan at 1% of the published trial counts per source and subset, with
/// the published speaker counts and 3-segment shares.
std::vector<TrialBlock> PublishedPlan(double scale = 0.01);

/// Reads a TOML population spec. Throws ConfigError with the offending key.
PopulationSpec ParsePopulationSpec(const std::string &toml_text);
PopulationSpec LoadPopulationSpec(const std::string &path);

struct SynthOutput {
  TrialSetManifest manifest;
  std::vector<double> oracle_llr;  // aligned with manifest.trials()
  EmbeddingSet embeddings;         // every enrollment and test segment
  EmbeddingSet train;              // empty unless train_speakers > 0
  PldaModel truth;                 // mu = 0, B and W as generated
};

/**
   Draws speaker means from N(0, B) and segments from N(mean, W), then
   assembles trials block by block: targets pair a model with another
   segment of its speaker, nontargets with a segment of a different speaker
   of the same gender and language. Oracle LLRs come from the true model
   with the enrollment mean scored as an n-observation average.
   Deterministic in the spec.
 */
SynthOutput Generate(const PopulationSpec &spec);

/// Writes key.tsv, trials.tsv, models.tsv, scores.tsv (oracle LLRs),
/// embeddings.tsv + embeddings.manifest.tsv and, with a training population,
/// train.tsv + train.manifest.tsv into `dir` (created if needed).
void WriteSynth(const SynthOutput &out, const std::string &dir);

}  // namespace sreval

#endif  // SREVAL_SYNTH_H_
