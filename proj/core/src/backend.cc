// core/src/backend.cc

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

#include "sreval/backend.h"

#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

namespace sreval {

namespace {

void CheckLabels(const Matrix &data, std::span<const int> labels) {
  if (static_cast<std::size_t>(data.rows()) != labels.size())
    throw Error("label count does not match the number of rows");
  for (int l : labels)
    if (l < 0) throw Error("speaker labels must be non-negative");
}

// Per-speaker sufficient statistics around the fixed mean.
struct ClassStats {
  std::vector<Vector> means;  // centered class means
  std::vector<int> counts;
  Matrix within_scatter;      // sum over rows of (x - m_class)(x - m_class)^T
  std::size_t n_rows = 0;
};

ClassStats GetClassStats(const Matrix &data, std::span<const int> labels,
                         const Vector &mu) {
  const Eigen::Index dim = data.cols();
  std::map<int, std::size_t> slot;
  for (int l : labels) slot.emplace(l, slot.size());
  // Map iteration is by label value; re-index so class order is by label.
  std::size_t k = 0;
  for (auto &[label, s] : slot) s = k++;
  ClassStats st;
  st.means.assign(slot.size(), Vector::Zero(dim));
  st.counts.assign(slot.size(), 0);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const std::size_t s = slot[labels[i]];
    st.means[s] += data.row(i).transpose();
    ++st.counts[s];
  }
  for (std::size_t s = 0; s < st.means.size(); ++s) st.means[s] /= st.counts[s];
  st.within_scatter = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Vector d = data.row(i).transpose() - st.means[slot[labels[i]]];
    st.within_scatter.selfadjointView<Eigen::Lower>().rankUpdate(d);
  }
  st.within_scatter = st.within_scatter.selfadjointView<Eigen::Lower>();
  for (Vector &m : st.means) m -= mu;
  st.n_rows = static_cast<std::size_t>(data.rows());
  return st;
}

Matrix Symmetrize(const Matrix &m) { return 0.5 * (m + m.transpose()); }

// Cholesky with a NumericError on failure.
Eigen::LLT<Matrix> Factor(const Matrix &m, const char *what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string(what) + " is not positive definite");
  return llt;
}

double LogDet(const Eigen::LLT<Matrix> &llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

double LogLikelihoodFromStats(const ClassStats &st, const Matrix &between,
                              const Matrix &within) {
  const double dim = static_cast<double>(within.rows());
  const double n_rows = static_cast<double>(st.n_rows);
  const double n_classes = static_cast<double>(st.counts.size());
  const auto w_llt = Factor(within, "within-class covariance");
  double ll = -0.5 * n_rows * dim * std::log(2.0 * std::numbers::pi);
  ll -= 0.5 * (n_rows - n_classes) * LogDet(w_llt);
  ll -= 0.5 * w_llt.solve(st.within_scatter).trace();
  std::map<int, Eigen::LLT<Matrix>> by_count;
  for (std::size_t s = 0; s < st.counts.size(); ++s) {
    const int n = st.counts[s];
    auto it = by_count.find(n);
    if (it == by_count.end())
      it = by_count.emplace(n, Factor(between + within / n, "B + W/n")).first;
    ll -= 0.5 * dim * std::log(static_cast<double>(n));
    ll -= 0.5 * (LogDet(it->second) + st.means[s].dot(it->second.solve(st.means[s])));
  }
  return ll;
}

}  // namespace

Eigen::Index EmbeddingSet::Find(const std::string &segment_id) const {
  for (std::size_t i = 0; i < segment_ids.size(); ++i)
    if (segment_ids[i] == segment_id) return static_cast<Eigen::Index>(i);
  throw Error("no embedding for segment " + segment_id);
}

EmbeddingSet EmbeddingSet::OriginalOnly() const {
  EmbeddingSet out;
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < size(); ++i)
    if (!degraded[i]) keep.push_back(static_cast<Eigen::Index>(i));
  out.data.resize(static_cast<Eigen::Index>(keep.size()), dim());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const auto i = static_cast<std::size_t>(keep[k]);
    out.segment_ids.push_back(segment_ids[i]);
    out.speaker_ids.push_back(speaker_ids[i]);
    out.degraded.push_back(false);
    out.data.row(static_cast<Eigen::Index>(k)) = data.row(keep[k]);
  }
  return out;
}

std::vector<int> SpeakerIndices(const std::vector<std::string> &speaker_ids,
                                std::size_t *n_speakers) {
  std::unordered_map<std::string, int> index;
  std::vector<int> out;
  out.reserve(speaker_ids.size());
  for (const auto &s : speaker_ids)
    out.push_back(index.emplace(s, static_cast<int>(index.size())).first->second);
  if (n_speakers) *n_speakers = index.size();
  return out;
}

Vector LengthNormalize(const Vector &x) {
  const double norm = x.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw NumericError("cannot length-normalize a zero or non-finite vector");
  return x / norm;
}

Vector Preprocessor::Whiten(const Vector &x) const {
  if (x.size() != mean.size())
    throw Error("embedding dimension " + std::to_string(x.size()) +
                " does not match preprocessor input " +
                std::to_string(mean.size()));
  return whitener * (x - mean);
}

Vector Preprocessor::Apply(const Vector &x) const {
  Vector y = LengthNormalize(Whiten(x));
  if (lda.size()) y = LengthNormalize(lda.transpose() * y);
  return y;
}

Matrix Preprocessor::ApplyRows(const Matrix &rows) const {
  Matrix out(rows.rows(), out_dim());
  for (Eigen::Index i = 0; i < rows.rows(); ++i)
    out.row(i) = Apply(rows.row(i).transpose()).transpose();
  return out;
}

Preprocessor FitWhitening(const Matrix &data, double ridge) {
  const Eigen::Index n = data.rows(), dim = data.cols();
  if (ridge < 0.0) throw ConfigError("ridge must be non-negative");
  if (n <= dim && ridge == 0.0)
    throw NumericError("rank-deficient covariance: " + std::to_string(n) +
                       " rows for dimension " + std::to_string(dim) +
                       "; supply more data or a ridge (e.g. 1e-6)");
  Preprocessor pre;
  pre.mean = data.colwise().mean().transpose();
  const Matrix centered = data.rowwise() - pre.mean.transpose();
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n);
  cov.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Matrix> es(Symmetrize(cov));
  if (es.info() != Eigen::Success)
    throw NumericError("covariance eigendecomposition failed");
  const Vector &lambda = es.eigenvalues();
  if (!(lambda.minCoeff() > 1e-12 * std::max(lambda.maxCoeff(), 1e-300)))
    throw NumericError(
        "rank-deficient covariance (smallest eigenvalue " +
        std::to_string(lambda.minCoeff()) +
        "); supply more data or a ridge (e.g. 1e-6)");
  pre.whitener = es.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose();
  return pre;
}

LdaResult FitLda(const Matrix &data, std::span<const int> labels,
                 Eigen::Index out_dim) {
  CheckLabels(data, labels);
  const Eigen::Index dim = data.cols();
  if (out_dim < 1 || out_dim > dim)
    throw ConfigError("LDA output dimension must be in [1, " +
                      std::to_string(dim) + "]");
  const Vector mean = data.colwise().mean().transpose();
  const ClassStats st = GetClassStats(data, labels, mean);
  const auto n_classes = static_cast<Eigen::Index>(st.counts.size());
  if (n_classes < out_dim + 1)
    throw Error("LDA to " + std::to_string(out_dim) + " dimensions needs at least " +
                std::to_string(out_dim + 1) + " speakers, got " +
                std::to_string(n_classes));
  for (int c : st.counts)
    if (c < 2) throw Error("every LDA speaker needs at least two segments");

  const double n = static_cast<double>(data.rows());
  const Matrix within = st.within_scatter / n;
  Matrix between = Matrix::Zero(dim, dim);
  for (std::size_t s = 0; s < st.means.size(); ++s)
    between.selfadjointView<Eigen::Lower>().rankUpdate(st.means[s],
                                                        st.counts[s] / n);
  between = Symmetrize(Matrix(between.selfadjointView<Eigen::Lower>()));

  Factor(within, "within-class scatter");
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(between, within);
  if (ges.info() != Eigen::Success)
    throw NumericError("LDA generalized eigenproblem failed");
  LdaResult out;
  out.transform.resize(dim, out_dim);
  out.eigenvalues.resize(out_dim);
  for (Eigen::Index k = 0; k < out_dim; ++k) {
    out.transform.col(k) = ges.eigenvectors().col(dim - 1 - k);
    out.eigenvalues(k) = ges.eigenvalues()(dim - 1 - k);
  }
  return out;
}

double PldaLogLikelihood(const PldaModel &model, const Matrix &data,
                         std::span<const int> labels) {
  CheckLabels(data, labels);
  return LogLikelihoodFromStats(GetClassStats(data, labels, model.mu),
                                model.between, model.within);
}

PldaModel FitPlda(const Matrix &data, std::span<const int> labels,
                  const PldaFitOptions &options, PldaFitReport *report) {
  CheckLabels(data, labels);
  const Eigen::Index dim = data.cols();
  PldaModel model;
  model.mu = data.colwise().mean().transpose();
  const ClassStats st = GetClassStats(data, labels, model.mu);
  if (st.counts.size() < 2)
    throw Error("PLDA needs at least two speakers");
  for (int c : st.counts)
    if (c < 2) throw Error("every PLDA speaker needs at least two segments");

  const Matrix centered = data.rowwise() - model.mu.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(data.rows());
  model.between = 0.5 * cov;
  model.within = 0.5 * cov;

  PldaFitReport rep;
  double ll = LogLikelihoodFromStats(st, model.between, model.within);
  rep.log_likelihood.push_back(ll);
  const double n_rows = static_cast<double>(st.n_rows);
  const double n_classes = static_cast<double>(st.counts.size());

  for (int iter = 0; iter < options.max_iters; ++iter) {
    // E-step, written so that B is never inverted:
    //   Cov(y | class) = B - B (B + W/n)^-1 B,  E[y | class] = B (B + W/n)^-1 m.
    Matrix between_stats = Matrix::Zero(dim, dim);
    Matrix within_stats = st.within_scatter;
    std::map<int, std::pair<Matrix, Matrix>> by_count;  // n -> (gain, post cov)
    for (std::size_t s = 0; s < st.counts.size(); ++s) {
      const int n = st.counts[s];
      auto it = by_count.find(n);
      if (it == by_count.end()) {
        const auto llt = Factor(model.between + model.within / n, "B + W/n");
        Matrix gain = llt.solve(model.between).transpose();  // B (B + W/n)^-1
        Matrix post = Symmetrize(model.between - gain * model.between);
        it = by_count.emplace(n, std::make_pair(std::move(gain), std::move(post))).first;
      }
      const auto &[gain, post] = it->second;
      const Vector w = gain * st.means[s];
      const Vector r = st.means[s] - w;
      between_stats += post + w * w.transpose();
      within_stats += n * (post + r * r.transpose());
    }
    // M-step.
    model.between = Symmetrize(between_stats / n_classes);
    model.within = Symmetrize(within_stats / n_rows);

    const double next = LogLikelihoodFromStats(st, model.between, model.within);
    rep.log_likelihood.push_back(next);
    rep.iterations = iter + 1;
    const double improvement = (next - ll) / std::abs(ll);
    ll = next;
    if (improvement < options.rel_tol) {
      rep.converged = true;
      break;
    }
  }
  if (report) *report = std::move(rep);
  return model;
}

PldaScorer::PldaScorer(const PldaModel &model, int n_enroll)
    : mu_(model.mu), n_enroll_(n_enroll) {
  if (n_enroll < 1) throw ConfigError("n_enroll must be positive");
  const Eigen::Index dim = model.mu.size();
  if (model.between.rows() != dim || model.within.rows() != dim)
    throw Error("PLDA model dimensions are inconsistent");
  const Matrix enroll_cov = model.between + model.within / n_enroll;
  const Matrix test_cov = model.between + model.within;
  Matrix joint(2 * dim, 2 * dim);
  joint << enroll_cov, model.between, model.between, test_cov;
  const auto joint_llt = Factor(joint, "joint trial covariance");
  const auto enroll_llt = Factor(enroll_cov, "enrollment covariance");
  const auto test_llt = Factor(test_cov, "test covariance");
  const Matrix joint_inv = joint_llt.solve(Matrix::Identity(2 * dim, 2 * dim));
  enroll_quad_ = Symmetrize(enroll_llt.solve(Matrix::Identity(dim, dim)) -
                            joint_inv.topLeftCorner(dim, dim));
  test_quad_ = Symmetrize(test_llt.solve(Matrix::Identity(dim, dim)) -
                          joint_inv.bottomRightCorner(dim, dim));
  cross_ = joint_inv.topRightCorner(dim, dim);
  offset_ = 0.5 * (LogDet(enroll_llt) + LogDet(test_llt) - LogDet(joint_llt));
}

double PldaScorer::Score(const Vector &enroll, const Vector &test) const {
  if (enroll.size() != mu_.size() || test.size() != mu_.size())
    throw Error("PLDA scoring dimension mismatch");
  const Vector e = enroll - mu_;
  const Vector t = test - mu_;
  return 0.5 * e.dot(enroll_quad_ * e) + 0.5 * t.dot(test_quad_ * t) -
         e.dot(cross_ * t) + offset_;
}

double PldaLlr(const PldaModel &model, const Vector &enroll, const Vector &test) {
  return PldaScorer(model).Score(enroll, test);
}

Vector Enroll(const Preprocessor &pre, const std::vector<Vector> &segments) {
  if (segments.empty()) throw Error("enrollment needs at least one segment");
  Vector sum = Vector::Zero(pre.out_dim());
  for (const Vector &s : segments) {
    if (s.size() != pre.in_dim())
      throw Error("enrollment segment dimension mismatch");
    sum += pre.Apply(s);
  }
  return LengthNormalize(sum / static_cast<double>(segments.size()));
}

BackendModel FitBackend(const EmbeddingSet &train, const BackendOptions &options,
                        BackendFitReport *report) {
  if (train.size() == 0) throw Error("no training embeddings");
  BackendModel model;
  model.pre = FitWhitening(train.data, options.ridge);

  std::vector<Eigen::Index> rows;
  std::vector<std::string> speakers;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.speaker_ids[i].empty()) continue;
    if (train.degraded[i] && !options.include_degraded) continue;
    rows.push_back(static_cast<Eigen::Index>(i));
    speakers.push_back(train.speaker_ids[i]);
  }
  std::size_t n_speakers = 0;
  const std::vector<int> labels = SpeakerIndices(speakers, &n_speakers);
  Matrix normalized(static_cast<Eigen::Index>(rows.size()), train.dim());
  for (std::size_t k = 0; k < rows.size(); ++k)
    normalized.row(static_cast<Eigen::Index>(k)) =
        LengthNormalize(model.pre.Whiten(train.data.row(rows[k]).transpose()))
            .transpose();

  const LdaResult lda = FitLda(normalized, labels, options.lda_dim);
  model.pre.lda = lda.transform;
  Matrix projected(normalized.rows(), options.lda_dim);
  for (Eigen::Index i = 0; i < normalized.rows(); ++i)
    projected.row(i) =
        LengthNormalize(lda.transform.transpose() * normalized.row(i).transpose())
            .transpose();

  BackendFitReport rep;
  model.plda = FitPlda(projected, labels, options.plda, &rep.plda);
  rep.lda_eigenvalues = lda.eigenvalues;
  rep.n_train = rows.size();
  rep.n_speakers = n_speakers;
  if (report) *report = std::move(rep);
  return model;
}

}  // namespace sreval
