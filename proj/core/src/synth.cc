// core/src/synth.cc

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

#include "sreval/synth.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_set>

#include "sreval/random.h"
#include "sreval/submission.h"

namespace sreval {

namespace {

// Stream indices; each stage draws from its own generator so that, e.g.,
// changing the trial plan leaves the embeddings of earlier speakers alone.
constexpr std::uint64_t kStreamBetween = 1;
constexpr std::uint64_t kStreamWithin = 2;
constexpr std::uint64_t kStreamSpeakers = 3;
constexpr std::uint64_t kStreamTrain = 4;
constexpr std::uint64_t kStreamBlock = 100;

Matrix RandomRotation(Eigen::Index dim, Rng &rng) {
  Matrix g(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) g(i, j) = rng.Normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

// A with A A^T = cov, for positive semidefinite cov.
Matrix SqrtFactor(const Matrix &cov) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector Draw(const Matrix &factor, Rng &rng) {
  Vector z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.Normal();
  return factor * z;
}

std::string Pad(std::size_t v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, v);
  return buf;
}

struct Speaker {
  std::string id;
  Gender gender;
  std::string language;
  std::size_t first_row;  // row of segment 0 in the embedding set
};

std::size_t Round(double x) { return static_cast<std::size_t>(std::llround(x)); }

}  // namespace

Matrix CovSpec::Build(Eigen::Index dim, std::uint64_t seed) const {
  Vector eig(dim);
  switch (kind) {
    case Kind::kIdentity:
      eig.setConstant(scale);
      break;
    case Kind::kDiagonal:
      if (static_cast<Eigen::Index>(diagonal.size()) != dim)
        throw ConfigError("diagonal covariance has " +
                          std::to_string(diagonal.size()) + " entries for dimension " +
                          std::to_string(dim));
      for (Eigen::Index i = 0; i < dim; ++i) eig(i) = diagonal[i];
      break;
    case Kind::kGeometric:
      if (!(ratio > 0.0)) throw ConfigError("geometric covariance ratio must be positive");
      for (Eigen::Index i = 0; i < dim; ++i) eig(i) = scale * std::pow(ratio, double(i));
      break;
  }
  for (Eigen::Index i = 0; i < dim; ++i)
    if (!(eig(i) >= 0.0) || !std::isfinite(eig(i)))
      throw ConfigError("covariance eigenvalues must be finite and non-negative");
  if (!rotate) return eig.asDiagonal();
  Rng rng(seed);
  const Matrix q = RandomRotation(dim, rng);
  const Matrix c = q * eig.asDiagonal() * q.transpose();
  return 0.5 * (c + c.transpose());
}

std::size_t PopulationSpec::n_speakers() const {
  std::size_t n = 0;
  for (const auto &b : plan) n += b.male_speakers + b.female_speakers;
  return n;
}

void PopulationSpec::Check() const {
  if (dim < 1) throw ConfigError("dim must be positive");
  if (segments_per_speaker < 2)
    throw ConfigError("segments_per_speaker must be at least 2 (1 to enroll, 1 to test)");
  if (plan.empty()) throw ConfigError("population spec has no trial blocks");
  std::size_t total = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const TrialBlock &b = plan[i];
    const std::string where = "block " + std::to_string(i) + ": ";
    if (!(b.frac_3seg >= 0.0 && b.frac_3seg <= 1.0))
      throw ConfigError(where + "frac_3seg must lie in [0, 1]");
    if (b.frac_3seg > 0.0 && segments_per_speaker < 4)
      throw ConfigError(where + "3-segment enrollment needs segments_per_speaker >= 4 "
                        "(3 to enroll, 1 to test), got " +
                        std::to_string(segments_per_speaker));
    if (b.languages.empty()) throw ConfigError(where + "no languages");
    if (b.n_target > 0 && b.male_speakers + b.female_speakers == 0)
      throw ConfigError(where + "target trials requested without speakers");
    if (b.n_nontarget > 0 && b.male_speakers < 2 && b.female_speakers < 2)
      throw ConfigError(where + "nontarget trials need two speakers of one gender");
    total += b.n_target + b.n_nontarget;
  }
  if (total == 0) throw ConfigError("population spec requests no trials");
  if (!(degraded_fraction >= 0.0 && degraded_fraction <= 1.0))
    throw ConfigError("degraded_fraction must lie in [0, 1]");
  if (train_speakers > 0 && train_segments_per_speaker < 1)
    throw ConfigError("train_segments_per_speaker must be positive");
}

std::vector<TrialBlock> PublishedPlan(double scale) {
  // Trial counts, 3-segment trial counts and speakers (M / F) per source and
  // subset, as published.
  struct Row {
    Source source;
    Subset subset;
    double target, nontarget, target3, nontarget3;
    std::size_t male, female;
  };
  static const Row rows[] = {
      {Source::kCmn2, Subset::kProgress, 1804, 255178, 343, 41410, 25, 58},
      {Source::kCmn2, Subset::kTest, 4123, 580256, 748, 89895, 61, 137},
      {Source::kMls, Subset::kProgress, 17992, 141584, 4498, 35396, 22, 25},
      {Source::kMls, Subset::kTest, 53084, 351912, 13271, 87978, 48, 81},
  };
  const std::vector<std::string> mls_progress = {
      "ara-arz", "ara-apc", "zho-cmn", "zho-yue",
      "eng-usg", "qsl-rus", "spa-car", "fre-hat"};
  const std::vector<std::string> mls_test = {
      "ara-arz", "ara-acm", "ara-apc", "ara-ary", "zho-cmn", "zho-nan",
      "zho-wuu", "zho-yue", "eng-usg", "eng-sas", "qsl-pol", "qsl-rus",
      "por-brz", "spa-car", "spa-eur", "spa-lac", "fre-hat", "fre-waf"};
  std::vector<TrialBlock> plan;
  for (const Row &r : rows) {
    TrialBlock b;
    b.source = r.source;
    b.subset = r.subset;
    b.n_target = Round(r.target * scale);
    b.n_nontarget = Round(r.nontarget * scale);
    b.frac_3seg = (r.target3 + r.nontarget3) / (r.target + r.nontarget);
    b.male_speakers = r.male;
    b.female_speakers = r.female;
    if (r.source == Source::kCmn2)
      b.languages = {"ara-aeb"};
    else
      b.languages = r.subset == Subset::kProgress ? mls_progress : mls_test;
    plan.push_back(std::move(b));
  }
  return plan;
}

SynthOutput Generate(const PopulationSpec &spec) {
  spec.Check();
  const Eigen::Index dim = spec.dim;
  const std::size_t spp = spec.segments_per_speaker;
  SynthOutput out;
  out.truth.mu = Vector::Zero(dim);
  out.truth.between = spec.between.Build(dim, Mix64(spec.seed ^ kStreamBetween));
  out.truth.within = spec.within.Build(dim, Mix64(spec.seed ^ kStreamWithin));
  const Matrix between_factor = SqrtFactor(out.truth.between);
  const Matrix within_factor = SqrtFactor(out.truth.within);

  // Speakers and their segment embeddings, block by block.
  Rng emb_rng = Rng::ForStream(spec.seed, kStreamSpeakers);
  std::vector<std::vector<Speaker>> block_speakers(spec.plan.size());
  const std::size_t n_rows = spec.n_speakers() * spp;
  out.embeddings.data.resize(static_cast<Eigen::Index>(n_rows), dim);
  std::size_t row = 0;
  for (std::size_t bi = 0; bi < spec.plan.size(); ++bi) {
    const TrialBlock &b = spec.plan[bi];
    const std::string prefix = "b" + std::to_string(bi) + "-" +
                               std::string(ToToken(b.source)) + "-" +
                               std::string(ToToken(b.subset)) + "-spk";
    for (int g = 0; g < 2; ++g) {
      const Gender gender = g == 0 ? Gender::kMale : Gender::kFemale;
      const std::size_t n_g = g == 0 ? b.male_speakers : b.female_speakers;
      // Keep at least two speakers per language so every speaker has
      // same-language impostors.
      const std::size_t n_lang =
          std::max<std::size_t>(1, std::min(b.languages.size(), n_g / 2));
      for (std::size_t k = 0; k < n_g; ++k) {
        Speaker s;
        s.id = prefix + Pad(block_speakers[bi].size(), 4);
        s.gender = gender;
        s.language = b.languages[k % n_lang];
        s.first_row = row;
        const Vector mean = Draw(between_factor, emb_rng);
        for (std::size_t j = 0; j < spp; ++j, ++row) {
          out.embeddings.data.row(static_cast<Eigen::Index>(row)) =
              (mean + Draw(within_factor, emb_rng)).transpose();
          out.embeddings.segment_ids.push_back(s.id + "-seg" + Pad(j, 2));
          out.embeddings.speaker_ids.push_back(s.id);
          out.embeddings.degraded.push_back(false);
        }
        block_speakers[bi].push_back(std::move(s));
      }
    }
  }

  const PldaScorer scorer1(out.truth, 1), scorer3(out.truth, 3);
  std::vector<Trial> trials;
  std::vector<EnrollmentModel> models;
  std::vector<double> llr;
  for (std::size_t bi = 0; bi < spec.plan.size(); ++bi) {
    const TrialBlock &b = spec.plan[bi];
    const auto &speakers = block_speakers[bi];
    if (speakers.empty()) continue;
    Rng rng = Rng::ForStream(spec.seed, kStreamBlock + bi);
    const bool with3 = b.frac_3seg > 0.0;
    const std::size_t first_test = with3 ? 3 : 1;
    const std::size_t n_test = spp - first_test;

    // Phones: the first three segments share phone 0, later ones alternate.
    auto phone_of = [](std::size_t seg) { return seg < 3 || seg % 2 == 0 ? 0 : 1; };
    std::vector<double> duration(speakers.size() * n_test);
    for (double &d : duration) d = 10.0 + 50.0 * rng.Uniform();

    std::map<std::pair<Gender, std::string>, std::vector<std::size_t>> groups;
    for (std::size_t s = 0; s < speakers.size(); ++s)
      groups[{speakers[s].gender, speakers[s].language}].push_back(s);
    std::vector<std::size_t> impostor_ok;  // speakers with a same-group peer
    for (std::size_t s = 0; s < speakers.size(); ++s)
      if (groups.at({speakers[s].gender, speakers[s].language}).size() >= 2)
        impostor_ok.push_back(s);

    for (const Speaker &s : speakers) {
      for (int n : {1, 3}) {
        if (n == 3 && !with3) continue;
        EnrollmentModel m;
        m.model_id = s.id + "-enr" + std::to_string(n);
        m.speaker_id = s.id;
        m.gender = s.gender;
        for (int j = 0; j < n; ++j)
          m.segments.push_back(out.embeddings.segment_ids[s.first_row + j]);
        m.phone_ids = {s.id + "-ph0"};  // enrollment segments all use phone 0
        models.push_back(std::move(m));
      }
    }

    std::vector<Vector> enroll1(speakers.size()), enroll3(speakers.size());
    for (std::size_t s = 0; s < speakers.size(); ++s) {
      const auto r = static_cast<Eigen::Index>(speakers[s].first_row);
      enroll1[s] = out.embeddings.data.row(r).transpose();
      if (with3)
        enroll3[s] = out.embeddings.data.middleRows(r, 3).colwise().mean().transpose();
    }

    std::unordered_set<TrialKey, TrialKeyHash> seen;
    std::vector<std::pair<Trial, double>> block_trials;
    auto place = [&](bool target, std::size_t count) {
      const std::size_t n3 = Round(static_cast<double>(count) * b.frac_3seg);
      const std::size_t max_attempts = 100 * count + 1000;
      std::size_t attempts = 0;
      for (std::size_t k = 0; k < count;) {
        if (++attempts > max_attempts)
          throw ConfigError("block " + std::to_string(bi) + ": cannot place " +
                            std::to_string(count) + " distinct " +
                            (target ? "target" : "nontarget") +
                            " trials; add speakers or segments");
        const int n = k < n3 ? 3 : 1;
        std::size_t ms, ts;
        if (target) {
          ms = ts = rng.Below(speakers.size());
        } else {
          ms = impostor_ok[rng.Below(impostor_ok.size())];
          const auto &peers = groups.at({speakers[ms].gender, speakers[ms].language});
          do ts = peers[rng.Below(peers.size())]; while (ts == ms);
        }
        const std::size_t seg = first_test + rng.Below(n_test);
        const Speaker &m = speakers[ms], &t = speakers[ts];
        Trial trial;
        trial.model_id = m.id + "-enr" + std::to_string(n);
        trial.segment_id = out.embeddings.segment_ids[t.first_row + seg];
        if (!seen.insert(trial.Key()).second) continue;
        trial.label = target ? Label::kTarget : Label::kNontarget;
        trial.source = b.source;
        trial.subset = b.subset;
        trial.gender = t.gender;
        trial.n_enroll = n;
        if (b.source == Source::kMls)
          trial.phone_match = PhoneMatch::kUnknown;
        else
          trial.phone_match = target && phone_of(seg) == 0 ? PhoneMatch::kSame
                                                           : PhoneMatch::kDifferent;
        trial.language = t.language;
        trial.duration_s = duration[ts * n_test + (seg - first_test)];
        const Vector test =
            out.embeddings.data.row(static_cast<Eigen::Index>(t.first_row + seg)).transpose();
        const double score = n == 3 ? scorer3.Score(enroll3[ms], test)
                                    : scorer1.Score(enroll1[ms], test);
        block_trials.push_back({std::move(trial), score});
        ++k;
      }
    };
    place(true, b.n_target);
    place(false, b.n_nontarget);
    for (std::size_t i = block_trials.size(); i > 1; --i)
      std::swap(block_trials[i - 1], block_trials[rng.Below(i)]);
    for (auto &[t, s] : block_trials) {
      trials.push_back(std::move(t));
      llr.push_back(s);
    }
  }
  out.manifest = TrialSetManifest(std::move(trials), std::move(models));
  out.oracle_llr = std::move(llr);

  if (spec.train_speakers > 0) {
    Rng rng = Rng::ForStream(spec.seed, kStreamTrain);
    std::vector<Vector> rows;
    for (std::size_t s = 0; s < spec.train_speakers; ++s) {
      const std::string id = "train-spk" + Pad(s, 5);
      const Vector mean = Draw(between_factor, rng);
      for (std::size_t j = 0; j < spec.train_segments_per_speaker; ++j) {
        const Vector x = mean + Draw(within_factor, rng);
        const std::string seg = id + "-seg" + Pad(j, 3);
        rows.push_back(x);
        out.train.segment_ids.push_back(seg);
        out.train.speaker_ids.push_back(id);
        out.train.degraded.push_back(false);
        if (spec.degraded_fraction > 0.0 && rng.Uniform() < spec.degraded_fraction) {
          Vector noise(dim);
          for (Eigen::Index i = 0; i < dim; ++i)
            noise(i) = std::sqrt(spec.degraded_variance) * rng.Normal();
          rows.push_back(x + noise);
          out.train.segment_ids.push_back(seg + "-deg");
          out.train.speaker_ids.push_back(id);
          out.train.degraded.push_back(true);
        }
      }
    }
    out.train.data.resize(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
      out.train.data.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return out;
}

void WriteSynth(const SynthOutput &out, const std::string &dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const char *name) {
    std::ofstream os(fs::path(dir) / name, std::ios::binary);
    if (!os) throw Error("cannot write " + (fs::path(dir) / name).string());
    return os;
  };
  {
    auto os = open("key.tsv");
    WriteKey(out.manifest, os);
  }
  const TrialList list = out.manifest.BlindList();
  {
    auto os = open("trials.tsv");
    WriteTrialList(list, os);
  }
  {
    auto os = open("models.tsv");
    WriteModels(out.manifest.models(), os);
  }
  {
    auto os = open("scores.tsv");
    WriteScores(list, out.oracle_llr, os);
  }
  SaveEmbeddings(out.embeddings, (fs::path(dir) / "embeddings.tsv").string(),
                 (fs::path(dir) / "embeddings.manifest.tsv").string());
  if (out.train.size() > 0)
    SaveEmbeddings(out.train, (fs::path(dir) / "train.tsv").string(),
                   (fs::path(dir) / "train.manifest.tsv").string());
}

}  // namespace sreval
