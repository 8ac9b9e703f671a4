// Command line front end for the ftr experiment harness.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ftr/harness.hpp"
#include "ftr/io.hpp"
#include "ftr/plot.hpp"
#include "ftr/serialize.hpp"

namespace {

using ftr::Errc;
using ftr::Error;
using ftr::Json;

int exit_code(Errc c) {
  switch (c) {
    case Errc::ConfigError:
    case Errc::ConfigMismatch:
    case Errc::InvalidProtocol:
      return 2;
    case Errc::DataError:
    case Errc::ParseError:
    case Errc::FormatError:
    case Errc::IoError:
      return 3;
    default:
      return 4;
  }
}

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("-c,--config", c.config, "experiment config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--set", c.sets, "override a config value, e.g. --set learner.depth=3 (repeatable)");
  cmd->add_option("--seed", c.seed, "experiment seed");
  cmd->add_flag("--paper-scale", c.paper_scale, "5000 training / 2000 test curves, B = 50 resamples of 2000");
}

// Applies "a.b.c=value"; value is parsed as JSON when possible, else kept as a string.
void apply_set(Json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(Errc::ConfigError, "--set expects key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  Json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) (*node)[parts[i]] = Json::object();
    node = &(*node)[parts[i]];
    if (!node->is_object()) throw Error(Errc::ConfigError, "--set path '" + path + "' crosses a non-object");
  }
  (*node)[parts.back()] = value;
}

ftr::ExperimentConfig load_config(const Common& c) {
  Json j = Json::object();
  if (!c.config.empty()) {
    const auto text = ftr::read_text(c.config);
    j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::ConfigError, "'" + c.config + "' is not valid JSON");
    // Relative CSV paths resolve against the config's directory.
    const auto base = std::filesystem::path(c.config).parent_path();
    if (j.contains("data") && j["data"].is_object())
      for (const char* key : {"train", "test"})
        if (j["data"].contains(key) && j["data"][key].is_string()) {
          std::filesystem::path p = j["data"][key].get<std::string>();
          if (p.is_relative() && !base.empty()) j["data"][key] = (base / p).string();
        }
  }
  for (const auto& s : c.sets) apply_set(j, s);
  auto cfg = ftr::config_from_json(j);
  if (c.seed) cfg.seed = *c.seed;
  if (c.paper_scale) ftr::apply_paper_scale(cfg);
  return cfg;
}

void write_json(const std::string& path, const Json& j) { ftr::write_text(path, j.dump(2) + "\n"); }

std::string join(const std::string& dir, const char* name) { return (std::filesystem::path(dir) / name).string(); }

void ensure_dir(const std::string& dir) { ftr::detail::ensure_dir(dir); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional TreeRank: wavelet-filtered ranking trees for curve data"};
  app.require_subcommand(1);

  Common gen_c, train_c, eval_c, cmp_c, sel_c;
  std::string gen_out = "dataset", train_out = "tree.json", eval_out = "report", cmp_out = "compare",
              sel_out = "select";
  std::string cmp_config_b;

  auto* gen = app.add_subcommand("generate", "sample a synthetic mixture and write train/test CSV plus metadata");
  add_common(gen, gen_c, false);
  gen->add_option("-o,--out", gen_out, "output directory");

  auto* train = app.add_subcommand("train", "fit one ranking tree on the training split and write it as JSON");
  add_common(train, train_c, false);
  train->add_option("-o,--out", train_out, "tree JSON path");

  std::string score_tree, score_data, score_out = "scores.csv";
  std::size_t score_sensors = 1;
  std::optional<std::uint64_t> score_seed;
  auto* score = app.add_subcommand("score", "score curves from a CSV file with a saved tree");
  score->add_option("-t,--tree", score_tree, "tree JSON")->required();
  score->add_option("-d,--data", score_data, "curve CSV (label first)")->required();
  score->add_option("--sensors", score_sensors, "sensor blocks per row");
  score->add_option("-o,--out", score_out, "scores CSV path");
  score->add_option("--seed", score_seed, "accepted for uniformity; scoring is deterministic");

  auto* ev = app.add_subcommand("evaluate", "run the configured protocol and write report.json and plots");
  add_common(ev, eval_c, true);
  ev->add_option("-o,--out", eval_out, "output directory");

  auto* cmp = app.add_subcommand("compare", "paired functional vs globally filtered comparison on shared resamples");
  add_common(cmp, cmp_c, true);
  cmp->add_option("--config-b", cmp_config_b,
                  "second config; default is the first with the other learner kind");
  cmp->add_option("-o,--out", cmp_out, "output directory");

  std::vector<std::size_t> candidates{10, 20, 51, 102, 205};
  double c_v = 1.0;
  bool no_penalty = false;
  auto* sel = app.add_subcommand("select-dim", "choose the filter dimension N by penalized training AUC");
  add_common(sel, sel_c, true);
  sel->add_option("--candidates", candidates, "candidate N values (comma separated)")->delimiter(',')->capture_default_str();
  sel->add_option("--c-v", c_v, "VC proportionality constant");
  sel->add_flag("--no-penalty", no_penalty, "rank candidates by raw training AUC");
  sel->add_option("-o,--out", sel_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*gen) {
      const auto cfg = load_config(gen_c);
      if (cfg.data.source != "synth") throw Error(Errc::ConfigError, "generate needs data.source = synth");
      for (const auto& p : ftr::export_synth_dataset(cfg, gen_out).paths) std::cout << p << '\n';
    } else if (*train) {
      const auto cfg = load_config(train_c);
      const auto d = ftr::prepare_data(cfg);
      for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
      const auto tree = ftr::fit_model(cfg, d, d.train_idx);
      write_json(train_out, ftr::to_json(tree));
      std::cout << train_out << " (" << tree.leaf_count() << " leaves)\n";
    } else if (*score) {
      const auto tree = ftr::ranking_tree_from_json(Json::parse(ftr::read_text(score_tree)));
      const auto in = ftr::ingest_csv(score_data, score_sensors);
      std::string out = "row,label,score\n";
      std::vector<double> s;
      for (std::size_t i = 0; i < in.data.size(); ++i) {
        const double v = tree.kind == ftr::RankingTree::Kind::Functional ? tree.score_curve(in.data.curves[i])
                                                                           : tree.score_row(in.data.curves[i]);
        s.push_back(v);
        out += std::to_string(i) + ',' + std::to_string(ftr::to_int(in.data.labels[i])) + ',' +
               ftr::detail::format_double(v) + '\n';
      }
      ftr::write_text(score_out, out);
      std::cout << score_out << '\n';
      std::size_t pos = 0;
      for (auto l : in.data.labels) pos += l == ftr::Label::Positive;
      if (pos > 0 && pos < in.data.size())
        std::cerr << "auc " << ftr::empirical_auc(s, in.data.labels) << '\n';
    } else if (*ev) {
      const auto cfg = load_config(eval_c);
      ensure_dir(eval_out);
      const auto d = ftr::prepare_data(cfg);
      for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
      const auto rep = ftr::run_protocol(cfg, d, ftr::learner_scorer(cfg, d));
      write_json(join(eval_out, "report.json"), ftr::to_json(rep));
      ftr::emit_plots(rep, eval_out);
      std::cout << "mean AUC " << rep.mean << " (sd " << rep.std << ", " << rep.runs.size() - rep.failed << "/"
                << rep.runs.size() << " runs)\n";
    } else if (*cmp) {
      const auto a = load_config(cmp_c);
      ftr::ExperimentConfig b = a;
      if (!cmp_config_b.empty()) {
        Common cb = cmp_c;
        cb.config = cmp_config_b;
        b = load_config(cb);
      } else {
        b.learner = a.learner == "functional_treerank" ? "filtered_treerank" : "functional_treerank";
      }
      ensure_dir(cmp_out);
      const auto rep = ftr::compare_local_vs_global(a, b);
      write_json(join(cmp_out, "comparison.json"), ftr::to_json(rep));
      ftr::emit_plots(rep.a, join(cmp_out, "a"));
      ftr::emit_plots(rep.b, join(cmp_out, "b"));
      std::cout << rep.a.learner << " " << rep.a.mean << ", " << rep.b.learner << " " << rep.b.mean
                << ", mean delta " << rep.mean_delta << '\n';
      if (!rep.hashes_identical) throw Error(Errc::IndexMismatch, "paired runs used different resamples");
    } else if (*sel) {
      const auto cfg = load_config(sel_c);
      ensure_dir(sel_out);
      ftr::PenaltySchedule sched;
      sched.c_v = c_v;
      sched.disabled = no_penalty;
      const auto rep = ftr::run_select_dimension(cfg, candidates, sched);
      write_json(join(sel_out, "selection.json"), ftr::to_json(rep));
      ftr::write_text(join(sel_out, "selection.csv"), ftr::format_selection_csv(rep));
      std::cout << "selected N = " << rep.selected << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "runtime " << secs << " s\n";
  return 0;
}
