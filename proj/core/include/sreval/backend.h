// sreval/backend.h

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

#ifndef SREVAL_BACKEND_H_
#define SREVAL_BACKEND_H_

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "sreval/common.h"

namespace sreval {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A collection of embeddings, one per row of `data`.
struct EmbeddingSet {
  std::vector<std::string> segment_ids;
  std::vector<std::string> speaker_ids;  // empty strings when unknown
  std::vector<bool> degraded;
  Matrix data;  // rows x dim

  std::size_t size() const { return segment_ids.size(); }
  Eigen::Index dim() const { return data.cols(); }
  /// Row index of a segment; throws Error if absent.
  Eigen::Index Find(const std::string &segment_id) const;
  /// Keeps only rows with degraded == false.
  EmbeddingSet OriginalOnly() const;
};

/// Speaker labels as dense integers 0..S-1, in order of first appearance.
std::vector<int> SpeakerIndices(const std::vector<std::string> &speaker_ids,
                                std::size_t *n_speakers = nullptr);

/**
   The embedding transform applied before PLDA:

     x -> whitener * (x - mean) -> length norm -> lda^T (.) -> length norm

   The whitener is the symmetric inverse square root of the training
   covariance, so it commutes with rotations of the input space.
 */
struct Preprocessor {
  Vector mean;
  Matrix whitener;  // dim x dim
  Matrix lda;       // dim x out_dim; empty until an LDA stage is fitted

  Eigen::Index in_dim() const { return mean.size(); }
  Eigen::Index out_dim() const { return lda.size() ? lda.cols() : mean.size(); }

  /// Centering and whitening only.
  Vector Whiten(const Vector &x) const;
  /// Full chain. Throws NumericError if a stage yields the zero vector.
  Vector Apply(const Vector &x) const;
  Matrix ApplyRows(const Matrix &rows) const;
};

/// Estimates mean and whitener from `data` (rows). The covariance is the
/// maximum-likelihood (1/n) estimate. Requires more rows than columns; a
/// rank-deficient covariance throws NumericError unless ridge > 0, in which
/// case ridge * I is added first.
Preprocessor FitWhitening(const Matrix &data, double ridge = 0.0);

struct LdaResult {
  Matrix transform;    // dim x out_dim, columns satisfy V^T S_w V = I
  Vector eigenvalues;  // between/within ratios, non-increasing
};

/// Fisher LDA from rows and speaker labels. Needs at least out_dim + 1
/// speakers, each with at least two rows.
LdaResult FitLda(const Matrix &data, std::span<const int> labels,
                 Eigen::Index out_dim);

/// Scales `x` to unit Euclidean length; throws NumericError on zero.
Vector LengthNormalize(const Vector &x);

/// Two-covariance PLDA: speaker mean y ~ N(mu, B), observation x ~ N(y, W).
/// With full-rank B this is the full-rank Eigenvoice model without a
/// channel subspace.
struct PldaModel {
  Vector mu;
  Matrix between;  // B, symmetric positive semidefinite
  Matrix within;   // W, symmetric positive definite
};

struct PldaFitOptions {
  int max_iters = 200;
  double rel_tol = 1e-7;
};

struct PldaFitReport {
  std::vector<double> log_likelihood;  // before the first and after each iteration
  int iterations = 0;
  bool converged = false;
};

/// EM for B and W with mu fixed at the data mean. Starts from
/// B = W = half the sample covariance.
PldaModel FitPlda(const Matrix &data, std::span<const int> labels,
                  const PldaFitOptions &options = {},
                  PldaFitReport *report = nullptr);

/// Marginal log-likelihood of the labelled data under the model.
double PldaLogLikelihood(const PldaModel &model, const Matrix &data,
                         std::span<const int> labels);

/**
   Closed-form verification LLR for an enrollment vector (the mean of
   `n_enroll` observations of one speaker) against one test vector:

     LLR = ln N([e; t]; [mu; mu], [[B + W/n, B], [B, B + W]])
           - ln N(e; mu, B + W/n) - ln N(t; mu, B + W).

   The quadratic forms are precomputed so that scoring costs O(dim^2).
 */
class PldaScorer {
 public:
  /// Throws NumericError if the joint covariance is not positive definite.
  explicit PldaScorer(const PldaModel &model, int n_enroll = 1);

  double Score(const Vector &enroll, const Vector &test) const;
  int n_enroll() const { return n_enroll_; }

 private:
  Vector mu_;
  Matrix enroll_quad_, test_quad_, cross_;
  double offset_ = 0.0;
  int n_enroll_;
};

double PldaLlr(const PldaModel &model, const Vector &enroll, const Vector &test);

/// Averages per-segment chain outputs and length-normalizes the mean.
Vector Enroll(const Preprocessor &pre, const std::vector<Vector> &segments);

struct BackendOptions {
  Eigen::Index lda_dim = 250;
  double ridge = 0.0;
  bool include_degraded = false;
  PldaFitOptions plda;
};

/// Preprocessor and PLDA trained together.
struct BackendModel {
  Preprocessor pre;
  PldaModel plda;
};

struct BackendFitReport {
  PldaFitReport plda;
  Vector lda_eigenvalues;
  std::size_t n_train = 0;
  std::size_t n_speakers = 0;
};

/// Whitening on all rows; LDA and PLDA on labelled original rows (degraded
/// rows too when include_degraded).
BackendModel FitBackend(const EmbeddingSet &train, const BackendOptions &options,
                        BackendFitReport *report = nullptr);

// Embedding files: a numeric matrix (TSV, one row per embedding, or binary)
// plus a sidecar manifest `segmentid speakerid condition`, where condition is
// `original` or `degraded` and speakerid may be `-`.
EmbeddingSet LoadEmbeddings(const std::string &matrix_path,
                            const std::string &manifest_path);
void SaveEmbeddings(const EmbeddingSet &set, const std::string &matrix_path,
                    const std::string &manifest_path, bool binary = false);

/// Self-describing JSON record with format name, version, dimensions and
/// row-major matrices.
void SaveBackendModel(const BackendModel &model, const std::string &path);
BackendModel LoadBackendModel(const std::string &path);

}  // namespace sreval

#endif  // SREVAL_BACKEND_H_
