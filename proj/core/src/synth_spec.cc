// core/src/synth_spec.cc

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

// TOML population specs. Example:
//
//   seed = 7
//   dim = 32
//   segments_per_speaker = 10
//   preset = "published"       # optional: the published plan at 1% scale
//   preset_scale = 0.01
//
//   [between]
//   kind = "geometric"         # identity | diagonal | geometric
//   scale = 2.0
//   ratio = 0.9
//   rotate = true
//
//   [within]
//   kind = "identity"
//   scale = 1.0
//
//   [train]
//   speakers = 500
//   segments_per_speaker = 10
//   degraded_fraction = 0.2
//   degraded_variance = 1.0
//
//   [[block]]
//   source = "cmn2"
//   subset = "progress"
//   targets = 18
//   nontargets = 2552
//   frac_3seg = 0.16
//   male_speakers = 25
//   female_speakers = 58
//   languages = ["ara-aeb"]

#include "sreval/synth.h"
#include "sreval/tsv.h"

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace sreval {

namespace {

template <typename T>
T Get(const toml::table &t, const std::string &key, T fallback,
      const std::string &where) {
  const toml::node *n = t.get(key);
  if (n == nullptr) return fallback;
  if constexpr (std::is_same_v<T, double>) {
    if (auto v = n->value<double>()) return *v;
  } else if constexpr (std::is_same_v<T, bool>) {
    if (auto v = n->as_boolean()) return v->get();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (auto v = n->as_string()) return v->get();
  } else {
    if (auto v = n->as_integer()) {
      if (v->get() < 0) throw ConfigError(where + key + " must be non-negative");
      return static_cast<T>(v->get());
    }
  }
  throw ConfigError(where + key + " has the wrong type");
}

void CheckKeys(const toml::table &t, std::initializer_list<std::string_view> allowed,
               const std::string &where) {
  for (const auto &[k, v] : t) {
    bool ok = false;
    for (auto a : allowed) ok = ok || k.str() == a;
    if (!ok) throw ConfigError(where + "unknown key '" + std::string(k.str()) + "'");
  }
}

CovSpec ParseCov(const toml::table &root, const std::string &name) {
  CovSpec c;
  const toml::table *t = root.get_as<toml::table>(name);
  if (t == nullptr) return c;
  const std::string where = name + ".";
  CheckKeys(*t, {"kind", "scale", "ratio", "diagonal", "rotate"}, where);
  const std::string kind = Get<std::string>(*t, "kind", "identity", where);
  if (kind == "identity")
    c.kind = CovSpec::Kind::kIdentity;
  else if (kind == "diagonal")
    c.kind = CovSpec::Kind::kDiagonal;
  else if (kind == "geometric")
    c.kind = CovSpec::Kind::kGeometric;
  else
    throw ConfigError(where + "kind must be identity, diagonal or geometric");
  c.scale = Get<double>(*t, "scale", 1.0, where);
  c.ratio = Get<double>(*t, "ratio", 0.5, where);
  c.rotate = Get<bool>(*t, "rotate", false, where);
  if (const toml::array *d = t->get_as<toml::array>("diagonal")) {
    for (const auto &e : *d) {
      auto v = e.value<double>();
      if (!v) throw ConfigError(where + "diagonal must hold numbers");
      c.diagonal.push_back(*v);
    }
  }
  return c;
}

TrialBlock ParseBlock(const toml::table &t, std::size_t index) {
  const std::string where = "block[" + std::to_string(index) + "].";
  CheckKeys(t, {"source", "subset", "targets", "nontargets", "frac_3seg",
                "male_speakers", "female_speakers", "languages"},
            where);
  TrialBlock b;
  if (!FromToken(Get<std::string>(t, "source", "", where), &b.source))
    throw ConfigError(where + "source must be cmn2 or mls");
  if (!FromToken(Get<std::string>(t, "subset", "", where), &b.subset))
    throw ConfigError(where + "subset must be progress or test");
  b.n_target = Get<std::size_t>(t, "targets", 0, where);
  b.n_nontarget = Get<std::size_t>(t, "nontargets", 0, where);
  b.frac_3seg = Get<double>(t, "frac_3seg", 0.0, where);
  b.male_speakers = Get<std::size_t>(t, "male_speakers", 0, where);
  b.female_speakers = Get<std::size_t>(t, "female_speakers", 0, where);
  if (const toml::array *langs = t.get_as<toml::array>("languages")) {
    for (const auto &e : *langs) {
      auto v = e.value<std::string>();
      if (!v) throw ConfigError(where + "languages must hold strings");
      b.languages.push_back(*v);
    }
  } else {
    b.languages = {b.source == Source::kCmn2 ? "ara-aeb" : "zho-cmn"};
  }
  return b;
}

}  // namespace

PopulationSpec ParsePopulationSpec(const std::string &toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error &e) {
    throw ConfigError(std::string("spec: ") + std::string(e.description()) +
                      " (line " + std::to_string(e.source().begin.line) + ")");
  }
  CheckKeys(root, {"seed", "dim", "segments_per_speaker", "preset", "preset_scale",
                   "between", "within", "train", "block"},
            "");
  PopulationSpec spec;
  spec.seed = Get<std::uint64_t>(root, "seed", spec.seed, "");
  spec.dim = Get<Eigen::Index>(root, "dim", spec.dim, "");
  spec.segments_per_speaker =
      Get<std::size_t>(root, "segments_per_speaker", spec.segments_per_speaker, "");
  spec.between = ParseCov(root, "between");
  spec.within = ParseCov(root, "within");

  const std::string preset = Get<std::string>(root, "preset", "", "");
  if (preset == "published")
    spec.plan = PublishedPlan(Get<double>(root, "preset_scale", 0.01, ""));
  else if (!preset.empty())
    throw ConfigError("unknown preset '" + preset + "' (known: published)");

  if (const toml::array *blocks = root.get_as<toml::array>("block")) {
    for (std::size_t i = 0; i < blocks->size(); ++i) {
      const toml::table *t = blocks->get(i)->as_table();
      if (t == nullptr) throw ConfigError("block entries must be tables");
      spec.plan.push_back(ParseBlock(*t, i));
    }
  }
  if (const toml::table *t = root.get_as<toml::table>("train")) {
    CheckKeys(*t, {"speakers", "segments_per_speaker", "degraded_fraction",
                   "degraded_variance"},
              "train.");
    spec.train_speakers = Get<std::size_t>(*t, "speakers", 0, "train.");
    spec.train_segments_per_speaker = Get<std::size_t>(
        *t, "segments_per_speaker", spec.train_segments_per_speaker, "train.");
    spec.degraded_fraction = Get<double>(*t, "degraded_fraction", 0.0, "train.");
    spec.degraded_variance = Get<double>(*t, "degraded_variance", 1.0, "train.");
  }
  spec.Check();
  return spec;
}

PopulationSpec LoadPopulationSpec(const std::string &path) {
  return ParsePopulationSpec(ReadFile(path));
}

}  // namespace sreval
