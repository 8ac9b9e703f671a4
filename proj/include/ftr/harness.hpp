#pragma once

// Experiment orchestration: declarative configs, dataset preparation,
// bootstrap / V-fold / holdout evaluation, paired learner comparison.
//
// Every random choice is drawn from a stream derived from the config seed
// and a fixed stream tag, so reports depend only on (config, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftr/error.hpp"
#include "ftr/filtering.hpp"
#include "ftr/io.hpp"
#include "ftr/metrics.hpp"
#include "ftr/modelselect.hpp"
#include "ftr/random.hpp"
#include "ftr/serialize.hpp"
#include "ftr/synth.hpp"
#include "ftr/treerank.hpp"

namespace ftr {

// ---------------------------------------------------------------------------
// Configuration

struct DataConfig {
  std::string source = "synth";  // synth | csv
  SynthParams synth{};
  std::optional<std::uint64_t> synth_seed;  // defaults to the experiment seed
  std::size_t n_train = 600;
  std::size_t n_test = 600;
  std::string train_path;
  std::string test_path;
  std::size_t sensors = 1;
  std::optional<bool> center;  // default: on for csv, off for synth
  double split = 2.0 / 3.0;    // training share when no test file is given
};

struct ExperimentConfig {
  DataConfig data{};
  Family family = Family::Beylkin;
  int j = -1;  // pool holds levels j0-1 .. j-1; -1 = all
  int j0 = 1;
  std::size_t n_coeffs = 0;
  double percent = 1.0;  // used when n_coeffs == 0
  SelectionMode mode = SelectionMode::TopVariance;
  double smoothness = 1.0;
  double level_constant = 1.5;
  double coefficient_floor = 1e-9;
  std::string learner = "functional_treerank";  // functional_treerank | filtered_treerank
  GrowParams grow{};
  bool prune = false;
  std::size_t prune_folds = 4;
  double prune_tolerance = 0.0;
  std::string protocol = "bootstrap";  // bootstrap | v_fold | holdout
  std::size_t boot_runs = 10;
  std::size_t resample_size = 0;  // 0 = training pool size
  std::size_t folds = 4;
  bool shuffle_folds = true;  // false: contiguous per-class blocks in row order
  std::size_t envelope_grid = 101;
  std::uint64_t seed = 1;
};

namespace detail {

inline void check_keys(const Json& j, const char* section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(Errc::ConfigError, std::string("section '") + section + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok |= it.key() == a;
    if (!ok) throw Error(Errc::ConfigError, "unknown key '" + it.key() + "' in '" + section + "'");
  }
}

template <class T>
void read_opt(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, std::string("config key '") + key + "': " + e.what());
  }
}

inline Family read_family(const Json& j, const char* key, Family def) {
  if (!j.contains(key)) return def;
  try {
    return family_from_string(j.at(key).get<std::string>());
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, e.what());
  }
}

}  // namespace detail

inline ExperimentConfig config_from_json(const Json& j) {
  using detail::read_opt;
  detail::check_keys(j, "config", {"seed", "data", "filter", "learner", "protocol", "envelope_grid"});
  ExperimentConfig c;
  read_opt(j, "seed", c.seed);
  read_opt(j, "envelope_grid", c.envelope_grid);
  if (j.contains("data")) {
    const auto& d = j.at("data");
    detail::check_keys(d, "data", {"source", "n_train", "n_test", "synth", "train", "test", "sensors", "center", "split"});
    read_opt(d, "source", c.data.source);
    read_opt(d, "n_train", c.data.n_train);
    read_opt(d, "n_test", c.data.n_test);
    read_opt(d, "train", c.data.train_path);
    read_opt(d, "test", c.data.test_path);
    read_opt(d, "sensors", c.data.sensors);
    read_opt(d, "split", c.data.split);
    if (d.contains("center")) c.data.center = d.at("center").get<bool>();
    if (d.contains("synth")) {
      const auto& s = d.at("synth");
      detail::check_keys(s, "synth", {"components", "target_auc", "atoms_per_scale", "amplitude_sd", "amplitude_decay",
                                      "atom_jmin", "atom_jmax", "dirichlet", "family", "length", "j0", "p", "noise_sd",
                                      "seed"});
      auto& sp = c.data.synth;
      read_opt(s, "components", sp.components);
      read_opt(s, "target_auc", sp.target_auc);
      read_opt(s, "atoms_per_scale", sp.atoms_per_scale);
      read_opt(s, "amplitude_sd", sp.amplitude_sd);
      read_opt(s, "amplitude_decay", sp.amplitude_decay);
      read_opt(s, "atom_jmin", sp.atom_jmin);
      read_opt(s, "atom_jmax", sp.atom_jmax);
      read_opt(s, "dirichlet", sp.dirichlet);
      sp.family = detail::read_family(s, "family", sp.family);
      read_opt(s, "length", sp.length);
      read_opt(s, "j0", sp.j0);
      read_opt(s, "p", sp.p);
      read_opt(s, "noise_sd", sp.noise_sd);
      if (s.contains("seed")) c.data.synth_seed = s.at("seed").get<std::uint64_t>();
    }
  }
  if (j.contains("filter")) {
    const auto& f = j.at("filter");
    detail::check_keys(f, "filter", {"family", "j", "j0", "n", "percent", "mode", "r", "c", "coefficient_floor"});
    c.family = detail::read_family(f, "family", c.family);
    read_opt(f, "j", c.j);
    read_opt(f, "j0", c.j0);
    read_opt(f, "n", c.n_coeffs);
    read_opt(f, "percent", c.percent);
    if (f.contains("mode")) {
      try {
        c.mode = selection_mode_from_string(f.at("mode").get<std::string>());
      } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ConfigError, e.what());
      }
    }
    read_opt(f, "r", c.smoothness);
    read_opt(f, "c", c.level_constant);
    read_opt(f, "coefficient_floor", c.coefficient_floor);
  }
  if (j.contains("learner")) {
    const auto& l = j.at("learner");
    detail::check_keys(l, "learner", {"kind", "depth", "max_leaves", "min_node", "min_split", "prune", "prune_folds",
                                      "prune_tolerance"});
    read_opt(l, "kind", c.learner);
    read_opt(l, "depth", c.grow.depth);
    read_opt(l, "max_leaves", c.grow.leaf.max_leaves);
    read_opt(l, "min_node", c.grow.leaf.min_node);
    read_opt(l, "min_split", c.grow.min_split);
    read_opt(l, "prune", c.prune);
    read_opt(l, "prune_folds", c.prune_folds);
    read_opt(l, "prune_tolerance", c.prune_tolerance);
  }
  if (j.contains("protocol")) {
    const auto& p = j.at("protocol");
    detail::check_keys(p, "protocol", {"kind", "B", "resample_size", "V", "shuffle"});
    read_opt(p, "kind", c.protocol);
    read_opt(p, "B", c.boot_runs);
    read_opt(p, "resample_size", c.resample_size);
    read_opt(p, "V", c.folds);
    read_opt(p, "shuffle", c.shuffle_folds);
  }

  if (c.data.source != "synth" && c.data.source != "csv")
    throw Error(Errc::ConfigError, "data.source must be 'synth' or 'csv'");
  if (c.data.source == "csv" && c.data.train_path.empty()) throw Error(Errc::ConfigError, "csv source needs data.train");
  if (c.learner != "functional_treerank" && c.learner != "filtered_treerank")
    throw Error(Errc::ConfigError, "learner.kind must be 'functional_treerank' or 'filtered_treerank'");
  if (c.protocol != "bootstrap" && c.protocol != "v_fold" && c.protocol != "holdout")
    throw Error(Errc::ConfigError, "protocol.kind must be 'bootstrap', 'v_fold' or 'holdout'");
  if (c.grow.depth < 1) throw Error(Errc::ConfigError, "learner.depth must be >= 1");
  if (c.grow.leaf.max_leaves < 2) throw Error(Errc::ConfigError, "learner.max_leaves must be >= 2");
  if (c.n_coeffs == 0 && !(c.percent > 0.0 && c.percent <= 100.0))
    throw Error(Errc::ConfigError, "filter.percent must lie in (0, 100]");
  if (c.boot_runs < 1) throw Error(Errc::ConfigError, "protocol.B must be >= 1");
  if (c.envelope_grid < 2) throw Error(Errc::ConfigError, "envelope_grid must be >= 2");
  if (!(c.data.split > 0.0 && c.data.split < 1.0)) throw Error(Errc::ConfigError, "data.split must lie in (0, 1)");
  return c;
}

/// Full-size runs: 5000 training curves, 2000 test curves, B = 50
/// resamples of 2000.
inline void apply_paper_scale(ExperimentConfig& c) {
  c.data.n_train = 5000;
  c.data.n_test = 2000;
  c.boot_runs = 50;
  c.resample_size = 2000;
}

inline Json to_json(const ExperimentConfig& c) {
  const auto& sp = c.data.synth;
  Json data = {{"source", c.data.source}, {"n_train", c.data.n_train}, {"n_test", c.data.n_test},
               {"sensors", c.data.sensors}, {"split", c.data.split}};
  if (c.data.source == "synth") {
    data["synth"] = {{"components", sp.components},
                     {"target_auc", sp.target_auc},
                     {"atoms_per_scale", sp.atoms_per_scale},
                     {"amplitude_sd", sp.amplitude_sd},
                     {"amplitude_decay", sp.amplitude_decay},
                     {"atom_jmin", sp.atom_jmin},
                     {"atom_jmax", sp.atom_jmax},
                     {"dirichlet", sp.dirichlet},
                     {"family", to_string(sp.family)},
                     {"length", sp.length},
                     {"j0", sp.j0},
                     {"p", sp.p},
                     {"noise_sd", sp.noise_sd},
                     {"seed", c.data.synth_seed.value_or(c.seed)}};
  } else {
    data["train"] = c.data.train_path;
    data["test"] = c.data.test_path;
  }
  data["center"] = c.data.center.value_or(c.data.source == "csv");
  Json filter = {{"family", to_string(c.family)}, {"j", c.j},         {"j0", c.j0},
                 {"mode", to_string(c.mode)},     {"r", c.smoothness}, {"c", c.level_constant},
                 {"coefficient_floor", c.coefficient_floor}};
  if (c.n_coeffs > 0)
    filter["n"] = c.n_coeffs;
  else
    filter["percent"] = c.percent;
  return {{"seed", c.seed},
          {"envelope_grid", c.envelope_grid},
          {"data", data},
          {"filter", filter},
          {"learner",
           {{"kind", c.learner},
            {"depth", c.grow.depth},
            {"max_leaves", c.grow.leaf.max_leaves},
            {"min_node", c.grow.leaf.min_node},
            {"min_split", c.grow.min_split},
            {"prune", c.prune},
            {"prune_folds", c.prune_folds},
            {"prune_tolerance", c.prune_tolerance}}},
          {"protocol",
           {{"kind", c.protocol}, {"B", c.boot_runs}, {"resample_size", c.resample_size}, {"V", c.folds},
            {"shuffle", c.shuffle_folds}}}};
}

// ---------------------------------------------------------------------------
// Data

struct PreparedData {
  LabeledCurveSet all;
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  std::optional<MixtureSpec> spec;
  std::uint64_t synth_seed = 0;
  std::vector<std::size_t> components;  // synth only, per row of `all`
  std::vector<double> oracle;           // synth only
  std::size_t raw_length = 0;
  std::size_t padded_length = 0;
  std::vector<double> center;
  CoefficientTable table;
  std::vector<std::string> warnings;
};

inline std::vector<std::size_t> iota_indices(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v;
  for (std::size_t i = from; i < to; ++i) v.push_back(i);
  return v;
}

inline std::uint64_t synth_seed(const ExperimentConfig& c) { return c.data.synth_seed.value_or(c.seed); }

/// Spec plus train/test samples exactly as `generate` writes them.
struct SynthDataset {
  MixtureSpec spec;
  std::vector<OracleSample> train;
  std::vector<OracleSample> test;
};

inline SynthDataset make_synth(const ExperimentConfig& c) {
  SynthParams sp = c.data.synth;
  sp.seed = synth_seed(c);
  SynthDataset d;
  d.spec = build_spec(sp);
  d.train = sample(d.spec, c.data.n_train, derive_seed(sp.seed, {10}));
  d.test = sample(d.spec, c.data.n_test, derive_seed(sp.seed, {11}));
  return d;
}

inline LabeledCurveSet to_curve_set(const std::vector<OracleSample>& s) {
  LabeledCurveSet out;
  for (const auto& o : s) {
    out.curves.push_back(o.curve);
    out.labels.push_back(o.label);
  }
  return out;
}

/// Stratified split of rows into (train, test) with `share` of each class
/// going to training.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(std::span<const Label> y,
                                                                                     double share, Rng& rng) {
  std::vector<std::size_t> pos, neg, tr, te;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == Label::Positive ? pos : neg).push_back(i);
  for (auto* cls : {&pos, &neg}) {
    shuffle(*cls, rng);
    const auto cut = static_cast<std::size_t>(std::llround(share * static_cast<double>(cls->size())));
    for (std::size_t i = 0; i < cls->size(); ++i) ((i < cut) ? tr : te).push_back((*cls)[i]);
  }
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  return {tr, te};
}

inline PreparedData prepare_data(const ExperimentConfig& c) {
  PreparedData d;
  if (c.data.source == "synth") {
    auto s = make_synth(c);
    d.synth_seed = synth_seed(c);
    d.all = to_curve_set(s.train);
    auto te = to_curve_set(s.test);
    d.all.curves.insert(d.all.curves.end(), te.curves.begin(), te.curves.end());
    d.all.labels.insert(d.all.labels.end(), te.labels.begin(), te.labels.end());
    for (const auto* part : {&s.train, &s.test})
      for (const auto& o : *part) {
        d.components.push_back(o.component);
        d.oracle.push_back(o.oracle_score);
      }
    d.train_idx = iota_indices(0, s.train.size());
    d.test_idx = iota_indices(s.train.size(), d.all.size());
    d.raw_length = d.padded_length = s.spec.length;
    d.spec = std::move(s.spec);
  } else {
    auto tr = ingest_csv(c.data.train_path, c.data.sensors);
    d.warnings = tr.warnings;
    d.raw_length = tr.raw_length;
    d.padded_length = tr.padded_length;
    d.all = std::move(tr.data);
    if (!c.data.test_path.empty()) {
      auto te = ingest_csv(c.data.test_path, c.data.sensors);
      if (te.padded_length != d.padded_length) throw Error(Errc::FormatError, "train and test curve lengths differ");
      d.train_idx = iota_indices(0, d.all.size());
      d.all.curves.insert(d.all.curves.end(), te.data.curves.begin(), te.data.curves.end());
      d.all.labels.insert(d.all.labels.end(), te.data.labels.begin(), te.data.labels.end());
      d.test_idx = iota_indices(d.train_idx.size(), d.all.size());
    } else {
      auto rng = make_rng(c.seed, {0x73706c74});
      std::tie(d.train_idx, d.test_idx) = stratified_split(d.all.labels, c.data.split, rng);
    }
  }
  d.all.validate();
  if (c.data.center.value_or(c.data.source == "csv")) {
    const std::size_t len = d.all.curves.front().size();
    std::vector<long double> acc(len, 0.0L);
    for (std::size_t r : d.train_idx)
      for (std::size_t t = 0; t < len; ++t) acc[t] += d.all.curves[r][t];
    d.center.resize(len);
    for (std::size_t t = 0; t < len; ++t)
      d.center[t] = static_cast<double>(acc[t] / static_cast<long double>(d.train_idx.size()));
    for (auto& curve : d.all.curves)
      for (std::size_t t = 0; t < len; ++t) curve[t] -= d.center[t];
  }
  d.table = transform_rows(d.all.curves, d.all.sensors, family_taps(c.family), c.j0, c.coefficient_floor);
  return d;
}

// ---------------------------------------------------------------------------
// Learners

inline FilterParams resolve_filter(const ExperimentConfig& c, const CoefficientTable& t) {
  FilterParams f;
  f.mode = c.mode;
  f.j = c.j;
  const int jtop = c.j < 0 ? t.jmax() + 1 : c.j;
  if (jtop < t.j0() || jtop > t.jmax() + 1)
    throw Error(Errc::ConfigError, "filter.j=" + std::to_string(c.j) + " outside [j0, " +
                                       std::to_string(t.jmax() + 1) + "]");
  const std::size_t pool = t.sensors() * (std::size_t{1} << jtop);
  std::size_t n = c.n_coeffs;
  if (n == 0) n = static_cast<std::size_t>(std::floor(c.percent / 100.0 * static_cast<double>(pool) + 1e-9));
  if (n < 1) throw Error(Errc::ConfigError, "filter size resolves to zero coefficients");
  if (n > pool)
    throw Error(Errc::ConfigError, "filter size " + std::to_string(n) + " exceeds the " + std::to_string(pool) +
                                       " available coefficients");
  f.n_coeffs = n;
  f.threshold.target_n = static_cast<double>(n);
  f.threshold.smoothness = c.smoothness;
  f.threshold.level_constant = c.level_constant;
  return f;
}

inline RankingTree fit_model(const ExperimentConfig& c, const PreparedData& d, std::span<const std::size_t> rows) {
  const auto f = resolve_filter(c, d.table);
  const bool functional = c.learner == "functional_treerank";
  auto grow = [&](std::span<const std::size_t> r) {
    return functional ? grow_functional(d.table, c.family, d.all.labels, r, f, c.grow)
                      : grow_filtered(d.table, c.family, d.all.labels, r, f, c.grow);
  };
  RankingTree tree = grow(rows);
  if (c.prune) {
    PruneParams pp;
    pp.folds = c.prune_folds;
    pp.tolerance = c.prune_tolerance;
    pp.seed = derive_seed(c.seed, {0x70726e, rows.size()});
    tree = prune(tree, [&](std::size_t r) { return d.table.row(r); }, d.all.labels, rows, grow, pp);
  }
  tree.center = d.center;
  return tree;
}

// ---------------------------------------------------------------------------
// Protocols

struct ScoredRun {
  std::vector<double> scores;
  std::size_t leaves = 0;
};

/// Maps (training rows, evaluation rows) to scores of the evaluation rows.
using Scorer = std::function<ScoredRun(std::span<const std::size_t>, std::span<const std::size_t>)>;

inline Scorer learner_scorer(const ExperimentConfig& c, const PreparedData& d) {
  return [&c, &d](std::span<const std::size_t> train, std::span<const std::size_t> eval) {
    const auto tree = fit_model(c, d, train);
    ScoredRun out;
    out.leaves = tree.leaf_count();
    out.scores = score_rows(tree, [&](std::size_t r) { return d.table.row(r); }, eval);
    return out;
  };
}

/// The synthetic generator's optimal scorer; ignores the training rows.
inline Scorer oracle_scorer(const PreparedData& d) {
  if (d.oracle.empty()) throw Error(Errc::ConfigError, "oracle scores exist only for synthetic data");
  return [&d](std::span<const std::size_t>, std::span<const std::size_t> eval) {
    ScoredRun out;
    for (std::size_t r : eval) out.scores.push_back(d.oracle[r]);
    return out;
  };
}

struct RunPlan {
  std::vector<std::vector<std::size_t>> train;
  std::vector<std::vector<std::size_t>> eval;
};

inline std::uint64_t index_hash(std::span<const std::size_t> idx) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t v : idx) {
    auto x = static_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

inline RunPlan make_plan(const ExperimentConfig& c, const PreparedData& d) {
  RunPlan plan;
  if (c.protocol == "bootstrap") {
    if (d.train_idx.empty() || d.test_idx.empty()) throw Error(Errc::InvalidProtocol, "bootstrap needs train and test sets");
    const std::size_t m = c.resample_size ? c.resample_size : d.train_idx.size();
    for (std::size_t b = 0; b < c.boot_runs; ++b) {
      auto rng = make_rng(c.seed, {0x626f6f74, b});
      std::vector<std::size_t> rows(m);
      for (auto& r : rows) r = d.train_idx[uniform_index(rng, 0, d.train_idx.size() - 1)];
      plan.train.push_back(std::move(rows));
      plan.eval.push_back(d.test_idx);
    }
  } else if (c.protocol == "v_fold") {
    const std::size_t n = d.all.size();
    if (c.folds < 2 || c.folds >= n || n < 2 * c.folds)
      throw Error(Errc::InvalidProtocol, "V=" + std::to_string(c.folds) + " folds need 2 <= V and n >= 2V (n=" +
                                             std::to_string(n) + ")");
    std::size_t pos = 0;
    for (Label l : d.all.labels) pos += l == Label::Positive;
    if (pos < c.folds || n - pos < c.folds)
      throw Error(Errc::InvalidProtocol, "every fold needs both classes");
    const auto rows = iota_indices(0, n);
    auto rng = make_rng(c.seed, {0x666f6c64});
    std::vector<std::size_t> fold;
    if (c.shuffle_folds) {
      fold = stratified_folds(d.all.labels, rows, c.folds, rng);
    } else {
      fold.resize(n);
      for (Label cls : {Label::Positive, Label::Negative}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
          if (d.all.labels[i] == cls) members.push_back(i);
        for (std::size_t k = 0; k < members.size(); ++k) fold[members[k]] = k * c.folds / members.size();
      }
    }
    for (std::size_t v = 0; v < c.folds; ++v) {
      std::vector<std::size_t> tr, ev;
      for (std::size_t i = 0; i < n; ++i) (fold[i] == v ? ev : tr).push_back(i);
      plan.train.push_back(std::move(tr));
      plan.eval.push_back(std::move(ev));
    }
  } else {
    if (d.train_idx.empty() || d.test_idx.empty()) throw Error(Errc::InvalidProtocol, "holdout needs train and test sets");
    plan.train.push_back(d.train_idx);
    plan.eval.push_back(d.test_idx);
  }
  return plan;
}

struct RunRecord {
  std::size_t run = 0;
  bool ok = false;
  double auc = 0.0;
  std::size_t train_size = 0;
  std::size_t eval_size = 0;
  std::uint64_t index_hash = 0;
  std::size_t leaves = 0;
  std::string error;
  RocCurve roc;
};

struct EvaluationReport {
  Json config;
  std::string protocol;
  std::string learner;
  std::vector<RunRecord> runs;
  std::size_t failed = 0;
  double mean = 0.0;
  double std = 0.0;
  std::optional<RocEnvelope> envelope;
  std::optional<double> optimal_auc;
  std::optional<double> oracle_test_auc;
  std::optional<MixtureSpec> spec;
  std::size_t raw_length = 0;
  std::size_t padded_length = 0;
};

/// Mean and sample standard deviation (n - 1 denominator; 0 for one value).
inline std::pair<double, double> mean_std(std::span<const double> v) {
  if (v.empty()) return {0.0, 0.0};
  long double s = 0.0L;
  for (double x : v) s += x;
  const double m = static_cast<double>(s / static_cast<long double>(v.size()));
  if (v.size() < 2) return {m, 0.0};
  long double q = 0.0L;
  for (double x : v) q += (static_cast<long double>(x) - m) * (static_cast<long double>(x) - m);
  return {m, static_cast<double>(std::sqrt(q / static_cast<long double>(v.size() - 1)))};
}

inline EvaluationReport run_protocol(const ExperimentConfig& c, const PreparedData& d, const Scorer& scorer) {
  EvaluationReport rep;
  rep.config = to_json(c);
  rep.protocol = c.protocol;
  rep.learner = c.learner;
  rep.raw_length = d.raw_length;
  rep.padded_length = d.padded_length;
  const auto plan = make_plan(c, d);
  std::vector<double> aucs;
  std::vector<RocCurve> curves;
  for (std::size_t i = 0; i < plan.train.size(); ++i) {
    RunRecord r;
    r.run = i;
    r.train_size = plan.train[i].size();
    r.eval_size = plan.eval[i].size();
    r.index_hash = index_hash(plan.train[i]);
    std::vector<Label> ey;
    for (std::size_t e : plan.eval[i]) ey.push_back(d.all.labels[e]);
    try {
      const auto sr = scorer(plan.train[i], plan.eval[i]);
      r.auc = empirical_auc(sr.scores, ey);
      r.roc = roc_curve(sr.scores, ey);
      r.leaves = sr.leaves;
      r.ok = true;
      aucs.push_back(r.auc);
      curves.push_back(r.roc);
    } catch (const Error& e) {
      r.error = e.what();
      ++rep.failed;
    }
    rep.runs.push_back(std::move(r));
  }
  std::tie(rep.mean, rep.std) = mean_std(aucs);
  if (!curves.empty()) rep.envelope = roc_envelope(curves, c.envelope_grid);
  if (d.spec) {
    rep.spec = d.spec;
    rep.optimal_auc = optimal_auc(*d.spec);
    if (!d.test_idx.empty()) {
      std::vector<double> s;
      std::vector<Label> y;
      for (std::size_t r : d.test_idx) {
        s.push_back(d.oracle[r]);
        y.push_back(d.all.labels[r]);
      }
      rep.oracle_test_auc = empirical_auc(s, y);
    }
  }
  return rep;
}

inline EvaluationReport evaluate(const ExperimentConfig& c) {
  const auto d = prepare_data(c);
  return run_protocol(c, d, learner_scorer(c, d));
}

inline std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline Json roc_json(const RocCurve& c) {
  Json a = Json::array();
  for (const auto& p : c.points) a.push_back({p.fpr, p.tpr});
  return a;
}

inline Json to_json(const EvaluationReport& r) {
  Json runs = Json::array();
  for (const auto& x : r.runs) {
    Json e = {{"run", x.run},
              {"ok", x.ok},
              {"train_size", x.train_size},
              {"eval_size", x.eval_size},
              {"index_hash", hex64(x.index_hash)}};
    if (x.ok) {
      e["auc"] = x.auc;
      e["leaves"] = x.leaves;
    } else {
      e["error"] = x.error;
    }
    runs.push_back(std::move(e));
  }
  Json j = {{"config", r.config},
            {"protocol", r.protocol},
            {"learner", r.learner},
            {"runs", runs},
            {"completed", r.runs.size() - r.failed},
            {"failed", r.failed},
            {"mean_auc", r.mean},
            {"std_auc", r.std},
            {"padding", {{"raw_length", r.raw_length}, {"padded_length", r.padded_length},
                         {"pad", r.padded_length - r.raw_length}}}};
  if (r.envelope) {
    Json fpr = Json::array(), lo = Json::array(), mid = Json::array(), hi = Json::array();
    for (std::size_t i = 0; i < r.envelope->mean.points.size(); ++i) {
      fpr.push_back(r.envelope->mean.points[i].fpr);
      lo.push_back(r.envelope->lower.points[i].tpr);
      mid.push_back(r.envelope->mean.points[i].tpr);
      hi.push_back(r.envelope->upper.points[i].tpr);
    }
    j["envelope"] = {{"fpr", fpr}, {"lower", lo}, {"mean", mid}, {"upper", hi}};
  }
  if (r.optimal_auc) j["optimal_auc"] = *r.optimal_auc;
  if (r.oracle_test_auc) j["oracle_test_auc"] = *r.oracle_test_auc;
  return j;
}

// ---------------------------------------------------------------------------
// Paired comparison

struct ComparisonReport {
  EvaluationReport a;
  EvaluationReport b;
  std::vector<double> delta;  // a - b per run, both runs ok
  double mean_delta = 0.0;
  double std_delta = 0.0;
  bool hashes_identical = true;
};

/// Runs two configs that differ only in learner kind on shared data and
/// shared resamples.
inline ComparisonReport compare_local_vs_global(const ExperimentConfig& ca, const ExperimentConfig& cb) {
  Json ja = to_json(ca), jb = to_json(cb);
  if (ja["protocol"] != jb["protocol"]) throw Error(Errc::ConfigMismatch, "compared configs use different protocols");
  ja["learner"].erase("kind");
  jb["learner"].erase("kind");
  if (ja != jb) throw Error(Errc::ConfigMismatch, "compared configs differ in more than the learner kind");

  const auto d = prepare_data(ca);
  ComparisonReport rep;
  rep.a = run_protocol(ca, d, learner_scorer(ca, d));
  rep.b = run_protocol(cb, d, learner_scorer(cb, d));
  std::vector<double> deltas;
  for (std::size_t i = 0; i < rep.a.runs.size(); ++i) {
    const auto& x = rep.a.runs[i];
    const auto& y = rep.b.runs[i];
    rep.hashes_identical &= x.index_hash == y.index_hash;
    if (x.ok && y.ok) rep.delta.push_back(x.auc - y.auc);
  }
  std::tie(rep.mean_delta, rep.std_delta) = mean_std(rep.delta);
  return rep;
}

inline Json to_json(const ComparisonReport& r) {
  Json pairs = Json::array();
  for (std::size_t i = 0; i < r.a.runs.size(); ++i) {
    const auto& x = r.a.runs[i];
    const auto& y = r.b.runs[i];
    Json e = {{"run", i}, {"index_hash_a", hex64(x.index_hash)}, {"index_hash_b", hex64(y.index_hash)}};
    if (x.ok) e["auc_a"] = x.auc;
    if (y.ok) e["auc_b"] = y.auc;
    if (x.ok && y.ok) e["delta"] = x.auc - y.auc;
    pairs.push_back(std::move(e));
  }
  return {{"learner_a", r.a.learner},
          {"learner_b", r.b.learner},
          {"mean_auc_a", r.a.mean},
          {"mean_auc_b", r.b.mean},
          {"mean_delta", r.mean_delta},
          {"std_delta", r.std_delta},
          {"hashes_identical", r.hashes_identical},
          {"pairs", pairs},
          {"report_a", to_json(r.a)},
          {"report_b", to_json(r.b)}};
}

// ---------------------------------------------------------------------------
// Dimension selection

inline SelectionReport run_select_dimension(const ExperimentConfig& c, std::vector<std::size_t> candidates,
                                            const PenaltySchedule& sched = {}) {
  const auto d = prepare_data(c);
  const auto f = resolve_filter(c, d.table);
  return select_dimension(d.table, c.family, d.all.labels, d.train_idx, std::move(candidates), f, c.grow, sched);
}

inline std::string format_selection_csv(const SelectionReport& r) {
  std::string out = "N,auc,pen,cpauc,selected\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.n_dim) + ',';
    if (row.ok)
      out += detail::format_double(row.auc) + ',' + detail::format_double(row.pen) + ',' +
             detail::format_double(row.cpauc);
    else
      out += ",,";
    out += row.n_dim == r.selected ? ",1\n" : ",0\n";
  }
  return out;
}

inline Json to_json(const SelectionReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json e = {{"N", row.n_dim}, {"ok", row.ok}};
    if (row.ok) {
      e["auc"] = row.auc;
      e["pen"] = row.pen;
      e["cpauc"] = row.cpauc;
    } else {
      e["error"] = row.error;
    }
    rows.push_back(std::move(e));
  }
  return {{"selected", r.selected}, {"rows", rows}};
}

}  // namespace ftr
