// tools/cli.cc

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

#include "cli.h"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sreval/backend.h"
#include "sreval/bootstrap.h"
#include "sreval/det.h"
#include "sreval/metrics.h"
#include "sreval/service.h"
#include "sreval/submission.h"
#include "sreval/synth.h"
#include "sreval/trialset.h"
#include "sreval/tsv.h"

namespace sreval::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Thrown when a score file is rejected; carries the exit code 2.
struct Rejected {
  std::string summary;
};

struct CommonOptions {
  std::string trials, models, scores, weights, subset = "all", format = "human";
  double c_miss = 1.0, c_fa = 1.0, p_target = 0.05;
  bool partial = false;
};

void AddInputs(CLI::App *app, CommonOptions *o, bool with_scores = true) {
  app->add_option("--trials", o->trials, "answer key (key.tsv)")
      ->required()
      ->envname("SREVAL_TRIALS");
  app->add_option("--models", o->models, "enrollment definitions (models.tsv)")
      ->envname("SREVAL_MODELS");
  if (with_scores)
    app->add_option("--scores", o->scores, "system output (scores.tsv)")
        ->required()
        ->envname("SREVAL_SCORES");
}

void AddCostOptions(CLI::App *app, CommonOptions *o) {
  app->add_option("--c-miss", o->c_miss, "cost of a miss")->capture_default_str();
  app->add_option("--c-fa", o->c_fa, "cost of a false alarm")->capture_default_str();
  app->add_option("--p-target", o->p_target, "prior probability of a target")
      ->capture_default_str();
  app->add_option("--weights", o->weights, "cell weights table")->envname("SREVAL_WEIGHTS");
  app->add_flag("--partial", o->partial, "skip empty condition cells with a warning");
  app->add_option("--subset", o->subset, "progress, test or all")
      ->check(CLI::IsMember({"progress", "test", "all"}))
      ->capture_default_str();
}

void AddFormat(CLI::App *app, CommonOptions *o) {
  app->add_option("--format", o->format, "human or machine")
      ->check(CLI::IsMember({"human", "machine"}))
      ->capture_default_str();
}

AggregateOptions MakeAggregateOptions(const CommonOptions &o) {
  AggregateOptions opt;
  if (!o.weights.empty()) opt.weights = CellWeights::Load(o.weights);
  opt.partial = o.partial;
  if (o.subset == "progress") opt.subset = Subset::kProgress;
  if (o.subset == "test") opt.subset = Subset::kTest;
  return opt;
}

bool LooksLikeKey(const std::string &path) {
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  return header.find("targettype") != std::string::npos;
}

// Scores aligned with manifest.trials(); throws Rejected.
std::vector<double> LoadAligned(const TrialSetManifest &manifest, const std::string &path) {
  const RawScores raw = LoadScores(path);
  ValidationResult v = Validate(raw, manifest.BlindList());
  if (!v.report.accepted()) throw Rejected{v.report.Summary()};
  return std::move(v.submission->llr);
}

json Record(const char *kind) { return {{"schema_version", kSchemaVersion}, {"record", kind}}; }

json ParamsJson(const CostParams &p) {
  return {{"c_miss", p.c_miss()}, {"c_fa", p.c_fa()}, {"p_target", p.p_target()},
          {"beta", p.beta()}, {"theta", p.theta_actual()}};
}

json CostJson(const CostResult &c) {
  return {{"p_miss", c.p_miss}, {"p_fa", c.p_fa}, {"c_norm", c.c_norm},
          {"theta", c.theta}, {"n_target", c.n_target}, {"n_nontarget", c.n_nontarget}};
}

json MarkerJson(const DetMarker &m) {
  return {{"theta", m.theta}, {"p_fa", m.p_fa}, {"p_miss", m.p_miss}, {"c_norm", m.c_norm}};
}

std::string Fixed(double v) { return FormatFixed(v, 4); }

// ---------------------------------------------------------------------------

int DoValidate(const CommonOptions &o, std::ostream &out) {
  const TrialList list = LooksLikeKey(o.trials) ? LoadTrials(o.trials).BlindList()
                                                : LoadTrialList(o.trials);
  const ValidationResult v = Validate(LoadScores(o.scores), list);
  const auto &r = v.report;
  if (o.format == "machine") {
    json j = Record("validation");
    json missing = json::array(), extra = json::array();
    for (const auto &k : r.missing) missing.push_back({k.model_id, k.segment_id});
    for (const auto &k : r.extra) extra.push_back({k.model_id, k.segment_id});
    j["accepted"] = r.accepted();
    j["n_trials"] = list.size();
    j["n_missing"] = r.n_missing;
    j["n_extra"] = r.n_extra;
    j["missing"] = std::move(missing);
    j["extra"] = std::move(extra);
    out << j.dump() << '\n';
  } else {
    out << r.Summary() << '\n';
  }
  return r.accepted() ? kOk : kValidation;
}

int DoScore(const CommonOptions &o, std::ostream &out, std::ostream &err) {
  const CostParams params(o.c_miss, o.c_fa, o.p_target);
  const AggregateOptions opt = MakeAggregateOptions(o);
  const TrialSetManifest manifest = LoadTrials(o.trials, o.models);
  const std::vector<double> llr = LoadAligned(manifest, o.scores);
  const AggregateCost actual = AggregateActual(llr, manifest, params, opt);
  const AggregateMinCost min = AggregateMin(llr, manifest, params, opt);
  for (const auto &w : actual.warnings) err << "warning: " << w << '\n';

  if (o.format == "machine") {
    json j = Record("score");
    j["params"] = ParamsJson(params);
    j["subset"] = o.subset;
    j["final_actual"] = actual.final;
    j["final_min"] = min.final;
    json sources = json::object();
    for (Source s : kAllSources) {
      const auto i = static_cast<std::size_t>(s);
      json src = json::object();
      src["actual"] = actual.per_source[i] ? json(*actual.per_source[i]) : json(nullptr);
      if (min.per_source[i])
        src["min"] = {{"c_norm", min.per_source[i]->c_norm},
                      {"theta", min.per_source[i]->theta},
                      {"p_miss", min.per_source[i]->p_miss},
                      {"p_fa", min.per_source[i]->p_fa}};
      else
        src["min"] = nullptr;
      sources[std::string(ToToken(s))] = std::move(src);
    }
    j["per_source"] = std::move(sources);
    json cells = json::array();
    for (std::size_t c = 0; c < kNumCells; ++c) {
      json cell = {{"cell", ConditionCell::FromIndex(c).Name()}};
      cell["actual"] = actual.per_cell[c] ? CostJson(*actual.per_cell[c]) : json(nullptr);
      cells.push_back(std::move(cell));
    }
    j["per_cell"] = std::move(cells);
    j["warnings"] = actual.warnings;
    out << j.dump() << '\n';
    return kOk;
  }

  out << "beta = " << FormatDouble(params.beta())
      << ", theta = ln(beta) = " << FormatFixed(params.theta_actual(), 6) << "\n\n";
  out << std::left << std::setw(16) << "cell" << std::right << std::setw(9) << "targets"
      << std::setw(12) << "nontargets" << std::setw(9) << "P_miss" << std::setw(9)
      << "P_fa" << std::setw(9) << "C_norm" << '\n';
  for (std::size_t c = 0; c < kNumCells; ++c) {
    out << std::left << std::setw(16) << ConditionCell::FromIndex(c).Name() << std::right;
    if (!actual.per_cell[c]) {
      out << std::setw(9) << "-" << std::setw(12) << "-" << std::setw(9) << "-"
          << std::setw(9) << "-" << std::setw(9) << "-" << '\n';
      continue;
    }
    const CostResult &r = *actual.per_cell[c];
    out << std::setw(9) << r.n_target << std::setw(12) << r.n_nontarget << std::setw(9)
        << Fixed(r.p_miss) << std::setw(9) << Fixed(r.p_fa) << std::setw(9)
        << Fixed(r.c_norm) << '\n';
  }
  out << '\n' << std::left << std::setw(16) << "source" << std::right << std::setw(9)
      << "actual" << std::setw(9) << "min" << '\n';
  for (Source s : kAllSources) {
    const auto i = static_cast<std::size_t>(s);
    out << std::left << std::setw(16) << ToToken(s) << std::right << std::setw(9)
        << (actual.per_source[i] ? Fixed(*actual.per_source[i]) : "-") << std::setw(9)
        << (min.per_source[i] ? Fixed(min.per_source[i]->c_norm) : "-") << '\n';
  }
  out << std::left << std::setw(16) << "final" << std::right << std::setw(9)
      << Fixed(actual.final) << std::setw(9) << Fixed(min.final) << '\n';
  return kOk;
}

int DoDet(const CommonOptions &o, const std::string &by, const std::string &out_dir,
          std::size_t contour_points, std::ostream &out, std::ostream &err) {
  const CostParams params(o.c_miss, o.c_fa, o.p_target);
  const AggregateOptions opt = MakeAggregateOptions(o);
  const TrialSetManifest manifest = LoadTrials(o.trials, o.models);
  const std::vector<double> llr = LoadAligned(manifest, o.scores);
  const auto cells = GroupByCell(llr, manifest, opt.subset);
  fs::create_directories(out_dir);

  auto usable = [&](std::size_t c) {
    bool t = false, n = false;
    for (const auto &s : cells[c]) (s.is_target ? t : n) = true;
    return t && n;
  };
  // Curve name -> cells it pools.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> curves;
  if (by == "cell") {
    for (std::size_t c = 0; c < kNumCells; ++c) {
      std::string name = ConditionCell::FromIndex(c).Name();
      std::replace(name.begin(), name.end(), '/', '_');
      curves.push_back({name, {c}});
    }
  } else if (by == "source") {
    for (Source s : kAllSources) {
      std::vector<std::size_t> members;
      for (std::size_t c = 0; c < kNumCells; ++c)
        if (ConditionCell::FromIndex(c).source == s) members.push_back(c);
      curves.push_back({std::string(ToToken(s)), members});
    }
  } else {
    std::vector<std::size_t> all(kNumCells);
    for (std::size_t c = 0; c < kNumCells; ++c) all[c] = c;
    curves.push_back({"all", all});
  }

  for (const auto &[name, members] : curves) {
    std::vector<WeightedGroup> groups;
    std::vector<std::string> cell_names;
    for (std::size_t c : members) cell_names.push_back(ConditionCell::FromIndex(c).Name());
    for (std::size_t i = 0; i < members.size(); ++i) {
      const std::size_t c = members[i];
      if (!usable(c)) {
        if (!o.partial)
          throw MetricError("cell " + cell_names[i] + " lacks targets or nontargets");
        err << "warning: skipping cell " << cell_names[i] << '\n';
        continue;
      }
      groups.push_back({cells[c], opt.weights[c], cell_names[i]});
    }
    if (groups.empty()) continue;
    const DetCurve curve = DetPoints(groups, params);
    const fs::path det_path = fs::path(out_dir) / ("det_" + name + ".tsv");
    {
      std::ofstream os(det_path, std::ios::binary);
      if (!os) throw Error("cannot write " + det_path.string());
      WriteDetTsv(curve, os);
    }
    const fs::path contour_path = fs::path(out_dir) / ("contour_" + name + ".tsv");
    {
      std::ofstream os(contour_path, std::ios::binary);
      if (!os) throw Error("cannot write " + contour_path.string());
      os << "marker\tc_norm\tp_fa\tp_miss\n";
      for (const auto &[label, m] : {std::pair{"actual", curve.actual},
                                     std::pair{"minimum", curve.minimum}}) {
        if (!(m.c_norm > 0.0)) continue;
        for (const ContourPoint &p : EquiCostContour(m.c_norm, params, contour_points))
          os << label << '\t' << FormatDouble(m.c_norm) << '\t' << FormatDouble(p.p_fa)
             << '\t' << FormatDouble(p.p_miss) << '\n';
      }
    }
    if (o.format == "machine") {
      json j = Record("det");
      j["name"] = name;
      j["path"] = det_path.string();
      j["contour_path"] = contour_path.string();
      j["n_points"] = curve.points.size();
      j["n_target"] = curve.n_target;
      j["n_nontarget"] = curve.n_nontarget;
      j["actual"] = MarkerJson(curve.actual);
      j["minimum"] = MarkerJson(curve.minimum);
      out << j.dump() << '\n';
    } else {
      out << name << ": " << curve.points.size() << " points -> " << det_path.string()
          << "\n  actual  p_fa=" << Fixed(curve.actual.p_fa)
          << " p_miss=" << Fixed(curve.actual.p_miss)
          << " C=" << Fixed(curve.actual.c_norm)
          << "\n  minimum p_fa=" << Fixed(curve.minimum.p_fa)
          << " p_miss=" << Fixed(curve.minimum.p_miss)
          << " C=" << Fixed(curve.minimum.c_norm) << '\n';
    }
  }
  return kOk;
}

int DoBootstrap(const CommonOptions &o, BootstrapConfig config, std::ostream &out) {
  const CostParams params(o.c_miss, o.c_fa, o.p_target);
  const AggregateOptions opt = MakeAggregateOptions(o);
  const TrialSetManifest manifest = LoadTrials(o.trials, o.models);
  const std::vector<double> llr = LoadAligned(manifest, o.scores);
  const CiResult ci = BootstrapCost(llr, manifest, params, config, opt);
  if (o.format == "machine") {
    json j = Record("bootstrap");
    j["seed"] = config.seed;
    j["generator"] = ci.generator;
    j["quantile_rule"] = ci.quantile_rule;
    j["n_resamples"] = config.n_resamples;
    j["level"] = config.level;
    j["two_level"] = config.two_level;
    j["n_models"] = ci.n_models;
    j["total_draws"] = ci.total_draws;
    j["point"] = ci.point;
    j["lo"] = ci.lo;
    j["hi"] = ci.hi;
    j["resample_costs"] = ci.resample_costs;
    out << j.dump() << '\n';
  } else {
    out << "seed " << config.seed << " (" << ci.generator << "), " << config.n_resamples
        << " resamples over " << ci.n_models << " models, " << ci.total_draws
        << " draws\n"
        << "actual cost " << Fixed(ci.point) << ", "
        << FormatDouble(100.0 * config.level) << "% interval [" << Fixed(ci.lo) << ", "
        << Fixed(ci.hi) << "] (" << ci.quantile_rule << ")\n";
  }
  return kOk;
}

int DoBackendFit(const std::string &train, const std::string &manifest,
                 const BackendOptions &options, const std::string &out_path,
                 const std::string &format, std::ostream &out) {
  const EmbeddingSet set = LoadEmbeddings(train, manifest);
  BackendFitReport report;
  const BackendModel model = FitBackend(set, options, &report);
  SaveBackendModel(model, out_path);
  if (format == "machine") {
    json j = Record("backend-fit");
    j["model"] = out_path;
    j["n_train"] = report.n_train;
    j["n_speakers"] = report.n_speakers;
    j["input_dim"] = model.pre.in_dim();
    j["output_dim"] = model.pre.out_dim();
    j["iterations"] = report.plda.iterations;
    j["converged"] = report.plda.converged;
    j["log_likelihood"] = report.plda.log_likelihood;
    out << j.dump() << '\n';
  } else {
    out << "trained on " << report.n_train << " embeddings of " << report.n_speakers
        << " speakers, " << model.pre.in_dim() << " -> " << model.pre.out_dim()
        << " dims; PLDA EM " << report.plda.iterations << " iterations"
        << (report.plda.converged ? " (converged)" : " (iteration limit)") << "\nwrote "
        << out_path << '\n';
  }
  return kOk;
}

int DoBackendScore(const std::string &model_path, const std::string &emb,
                   const std::string &emb_manifest, const std::string &trials,
                   const std::string &models_path, const std::string &out_path,
                   std::ostream &out) {
  const BackendModel model = LoadBackendModel(model_path);
  const EmbeddingSet set = LoadEmbeddings(emb, emb_manifest);
  const TrialList list = LooksLikeKey(trials) ? LoadTrials(trials).BlindList()
                                              : LoadTrialList(trials);
  std::ifstream mis(models_path);
  if (!mis) throw Error("cannot open " + models_path);
  std::map<std::string, EnrollmentModel> models;
  for (auto &m : ReadModels(mis)) models.emplace(m.model_id, std::move(m));

  std::unordered_map<std::string, Eigen::Index> row_of;
  for (std::size_t i = 0; i < set.size(); ++i)
    row_of.emplace(set.segment_ids[i], static_cast<Eigen::Index>(i));
  auto row = [&](const std::string &seg) -> Vector {
    auto it = row_of.find(seg);
    if (it == row_of.end()) throw Error("no embedding for segment " + seg);
    return set.data.row(it->second).transpose();
  };

  const PldaScorer scorer(model.plda);
  std::unordered_map<std::string, Vector> enrolled, tested;
  std::vector<double> llr;
  llr.reserve(list.size());
  for (const TrialKey &k : list.keys()) {
    auto e = enrolled.find(k.model_id);
    if (e == enrolled.end()) {
      auto m = models.find(k.model_id);
      if (m == models.end()) throw Error("model " + k.model_id + " not in " + models_path);
      std::vector<Vector> segs;
      for (const auto &s : m->second.segments) segs.push_back(row(s));
      e = enrolled.emplace(k.model_id, Enroll(model.pre, segs)).first;
    }
    auto t = tested.find(k.segment_id);
    if (t == tested.end())
      t = tested.emplace(k.segment_id, model.pre.Apply(row(k.segment_id))).first;
    llr.push_back(scorer.Score(e->second, t->second));
  }
  if (out_path.empty() || out_path == "-") {
    WriteScores(list, llr, out);
  } else {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw Error("cannot write " + out_path);
    WriteScores(list, llr, os);
  }
  return kOk;
}

int DoSynth(const std::string &spec_path, const std::string &out_dir,
            std::optional<std::uint64_t> seed, const std::string &format,
            std::ostream &out) {
  PopulationSpec spec = LoadPopulationSpec(spec_path);
  if (seed) spec.seed = *seed;
  const SynthOutput s = Generate(spec);
  WriteSynth(s, out_dir);
  CellCounts c = s.manifest.Count(Subset::kProgress);
  c += s.manifest.Count(Subset::kTest);
  if (format == "machine") {
    json j = Record("synth");
    j["seed"] = spec.seed;
    j["generator"] = Rng::kGeneratorName;
    j["out"] = out_dir;
    j["n_trials"] = s.manifest.trials().size();
    j["n_target"] = c.n_target;
    j["n_nontarget"] = c.n_nontarget;
    j["n_models"] = s.manifest.models().size();
    j["n_train"] = s.train.size();
    out << j.dump() << '\n';
  } else {
    out << "seed " << spec.seed << ": " << s.manifest.trials().size() << " trials ("
        << c.n_target << " target), " << s.manifest.models().size() << " models, "
        << s.train.size() << " training embeddings -> " << out_dir << '\n';
  }
  return kOk;
}

int DoServe(const std::string &config_path, const std::string &listen, std::ostream &out) {
  ServiceConfig config = config_path.empty() ? ServiceConfig{} : ServiceConfig::Load(config_path);
  config.ApplyEnvironment();
  if (!listen.empty()) config.listen = listen;
  config.Check();

  // Block termination signals here so that every thread inherits the mask and
  // a dedicated waiter can stop the server cleanly.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Platform platform(config);
  HttpServer server(platform);
  const int port = server.Bind(config.listen);
  out << "listening on " << config.listen.substr(0, config.listen.rfind(':')) << ':'
      << port << " (data in " << config.data_dir << ")" << std::endl;
  std::jthread waiter([&](std::stop_token) {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  server.Serve();
  waiter.detach();
  return kOk;
}

}  // namespace

int Run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Speaker-recognition evaluation tools", "sreval"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every subcommand");

  CommonOptions validate_o, score_o, det_o, boot_o;

  CLI::App *validate = app.add_subcommand("validate", "check a score file against a trial list");
  validate->add_option("--trials", validate_o.trials, "trial list or answer key")
      ->required()
      ->envname("SREVAL_TRIALS");
  validate->add_option("--scores", validate_o.scores, "system output")
      ->required()
      ->envname("SREVAL_SCORES");
  AddFormat(validate, &validate_o);

  CLI::App *score = app.add_subcommand("score", "actual and minimum detection costs");
  AddInputs(score, &score_o);
  AddCostOptions(score, &score_o);
  AddFormat(score, &score_o);

  std::string det_by = "all", det_out = ".";
  std::size_t contour_points = 200;
  CLI::App *det = app.add_subcommand("det", "DET curve data and equi-cost contours");
  AddInputs(det, &det_o);
  AddCostOptions(det, &det_o);
  AddFormat(det, &det_o);
  det->add_option("--by", det_by, "cell, source or all")
      ->check(CLI::IsMember({"cell", "source", "all"}))
      ->capture_default_str();
  det->add_option("--out", det_out, "output directory")->envname("SREVAL_OUT");
  det->add_option("--contour-points", contour_points, "points per contour")
      ->capture_default_str();

  BootstrapConfig boot_config;
  CLI::App *boot = app.add_subcommand("bootstrap", "confidence interval for the actual cost");
  AddInputs(boot, &boot_o);
  AddCostOptions(boot, &boot_o);
  AddFormat(boot, &boot_o);
  boot->add_option("--n", boot_config.n_resamples, "resamples")->capture_default_str();
  boot->add_option("--seed", boot_config.seed, "random seed")->capture_default_str();
  boot->add_option("--level", boot_config.level, "confidence level")->capture_default_str();
  boot->add_option("--threads", boot_config.threads, "worker threads")->capture_default_str();
  boot->add_flag("--two-level", boot_config.two_level,
                 "also resample trials within each drawn model");

  std::string fit_train, fit_manifest, fit_out, fit_format = "human";
  BackendOptions fit_options;
  CLI::App *fit = app.add_subcommand("backend-fit", "train whitening, LDA and PLDA");
  fit->add_option("--train", fit_train, "training embeddings (TSV or binary)")
      ->required()
      ->envname("SREVAL_TRAIN");
  fit->add_option("--train-manifest", fit_manifest, "segmentid/speakerid/condition manifest")
      ->required()
      ->envname("SREVAL_TRAIN_MANIFEST");
  fit->add_option("--out", fit_out, "model file (JSON)")->required()->envname("SREVAL_OUT");
  fit->add_option("--lda-dim", fit_options.lda_dim, "LDA output dimension")
      ->capture_default_str();
  fit->add_option("--ridge", fit_options.ridge, "diagonal loading for whitening")
      ->capture_default_str();
  fit->add_flag("--include-degraded", fit_options.include_degraded,
                "also train LDA and PLDA on degraded copies");
  fit->add_option("--max-iters", fit_options.plda.max_iters, "PLDA EM iteration limit")
      ->capture_default_str();
  fit->add_option("--format", fit_format, "human or machine")
      ->check(CLI::IsMember({"human", "machine"}));

  std::string sc_model, sc_emb, sc_emb_manifest, sc_trials, sc_models, sc_out;
  CLI::App *bscore = app.add_subcommand("backend-score", "score trials with a trained backend");
  bscore->add_option("--model", sc_model, "model file")->required()->envname("SREVAL_MODEL");
  bscore->add_option("--embeddings", sc_emb, "evaluation embeddings")
      ->required()
      ->envname("SREVAL_EMBEDDINGS");
  bscore->add_option("--embeddings-manifest", sc_emb_manifest, "their manifest")
      ->required()
      ->envname("SREVAL_EMBEDDINGS_MANIFEST");
  bscore->add_option("--trials", sc_trials, "trial list or answer key")
      ->required()
      ->envname("SREVAL_TRIALS");
  bscore->add_option("--models", sc_models, "enrollment definitions (models.tsv)")
      ->required()
      ->envname("SREVAL_MODELS");
  bscore->add_option("--out", sc_out, "scores.tsv (default: stdout)")->envname("SREVAL_OUT");

  std::string synth_spec, synth_out, synth_format = "human";
  std::optional<std::uint64_t> synth_seed;
  CLI::App *synth = app.add_subcommand("synth", "generate a synthetic evaluation");
  synth->add_option("--spec", synth_spec, "population spec (TOML)")
      ->required()
      ->envname("SREVAL_SPEC");
  synth->add_option("--out", synth_out, "output directory")->required()->envname("SREVAL_OUT");
  synth->add_option("--seed", synth_seed, "override the spec's seed");
  synth->add_option("--format", synth_format, "human or machine")
      ->check(CLI::IsMember({"human", "machine"}));

  std::string serve_config, serve_listen;
  CLI::App *serve = app.add_subcommand("serve", "run the leaderboard HTTP service");
  serve->add_option("--config", serve_config, "service config (JSON)")
      ->envname("SREVAL_CONFIG");
  serve->add_option("--listen", serve_listen, "host:port, overrides the config");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*validate) return DoValidate(validate_o, out);
    if (*score) return DoScore(score_o, out, err);
    if (*det) return DoDet(det_o, det_by, det_out, contour_points, out, err);
    if (*boot) {
      if (boot_o.format == "human")
        err << "bootstrap seed " << boot_config.seed << '\n';
      return DoBootstrap(boot_o, boot_config, out);
    }
    if (*fit) return DoBackendFit(fit_train, fit_manifest, fit_options, fit_out, fit_format, out);
    if (*bscore)
      return DoBackendScore(sc_model, sc_emb, sc_emb_manifest, sc_trials, sc_models, sc_out,
                            out);
    if (*synth) return DoSynth(synth_spec, synth_out, synth_seed, synth_format, out);
    if (*serve) return DoServe(serve_config, serve_listen, out);
  } catch (const Rejected &r) {
    err << "rejected: " << r.summary << '\n';
    return kValidation;
  } catch (const ParseError &e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const MetricError &e) {
    // Inputs that parse but cannot be scored (e.g. an empty condition cell).
    err << "cannot score: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

}  // namespace sreval::cli
