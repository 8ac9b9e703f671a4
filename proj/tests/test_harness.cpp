#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ftr/harness.hpp"
#include "ftr/io.hpp"
#include "ftr/plot.hpp"

namespace {

using namespace ftr;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto p = fs::path(::testing::TempDir()) / ("ftr_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Small synthetic setup that keeps each run well under a second.
ExperimentConfig small_synth(std::size_t n_train = 200, std::size_t n_test = 200, std::size_t length = 256) {
  ExperimentConfig c;
  c.data.synth.length = length;
  c.data.synth.components = 20;
  c.data.n_train = n_train;
  c.data.n_test = n_test;
  c.n_coeffs = 10;
  c.grow.depth = 3;
  c.boot_runs = 4;
  return c;
}

ExperimentConfig case_a() {
  const auto j = Json::parse(read_text(std::string(FTR_CONFIG_DIR) + "/case_a_functional.json"));
  return config_from_json(j);
}

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc{};
}

// --------------------------------------------------------------------------
// Config

TEST(Config, JsonRoundTripIsStable) {
  const auto c = case_a();
  EXPECT_EQ(to_json(config_from_json(to_json(c))), to_json(c));
  EXPECT_EQ(c.n_coeffs, 20u);
  EXPECT_EQ(c.j, 11);
  EXPECT_EQ(c.family, Family::Beylkin);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_EQ(code_of([] { config_from_json(Json{{"sed", 1}}); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(Json{{"filter", {{"famly", "haar"}}}}); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(Json{{"learner", {{"kind", "svm"}}}}); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(Json{{"protocol", {{"kind", "jackknife"}}}}); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(Json{{"filter", {{"percent", 0.0}}}}); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(Json{{"filter", {{"family", "morlet"}}}}); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(Json{{"data", {{"source", "csv"}}}}); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { config_from_json(Json{{"protocol", {{"B", 0}}}}); }), Errc::ConfigError);
}

TEST(Config, PaperScaleRestoresFullSizes) {
  auto c = case_a();
  apply_paper_scale(c);
  EXPECT_EQ(c.data.n_train, 5000u);
  EXPECT_EQ(c.data.n_test, 2000u);
  EXPECT_EQ(c.boot_runs, 50u);
  EXPECT_EQ(c.resample_size, 2000u);
}

TEST(Config, PercentResolvesToFloorOfPool) {
  auto c = small_synth(20, 20, 2048);
  c.n_coeffs = 0;
  const auto d = prepare_data(c);
  c.j = 11;
  for (auto [pct, want] : {std::pair{1.0, 20u}, {0.5, 10u}, {5.0, 102u}, {100.0, 2048u}}) {
    c.percent = pct;
    EXPECT_EQ(resolve_filter(c, d.table).n_coeffs, want) << pct;
  }
  c.percent = 0.01;  // 0.2 coefficients
  EXPECT_EQ(code_of([&] { resolve_filter(c, d.table); }), Errc::ConfigError);
  c.n_coeffs = 4096;
  EXPECT_EQ(code_of([&] { resolve_filter(c, d.table); }), Errc::ConfigError);
}

// --------------------------------------------------------------------------
// Bootstrap / holdout

TEST(Bootstrap, SingleRunWithOracleScorerReportsOracleTestAuc) {
  auto c = small_synth();
  c.boot_runs = 1;
  const auto d = prepare_data(c);
  const auto rep = run_protocol(c, d, oracle_scorer(d));
  ASSERT_EQ(rep.runs.size(), 1u);
  ASSERT_TRUE(rep.oracle_test_auc.has_value());
  std::vector<double> s;
  std::vector<Label> y;
  for (std::size_t r : d.test_idx) {
    s.push_back(d.oracle[r]);
    y.push_back(d.all.labels[r]);
  }
  EXPECT_EQ(rep.mean, empirical_auc(s, y));
  EXPECT_EQ(rep.mean, *rep.oracle_test_auc);
  EXPECT_EQ(rep.std, 0.0);
}

TEST(Bootstrap, ResamplesDrawFromTrainingPool) {
  auto c = small_synth();
  c.boot_runs = 6;
  const auto d = prepare_data(c);
  for (std::size_t m : {0u, 50u}) {
    c.resample_size = m;
    const auto plan = make_plan(c, d);
    ASSERT_EQ(plan.train.size(), 6u);
    for (std::size_t b = 0; b < 6; ++b) {
      EXPECT_EQ(plan.train[b].size(), m ? m : d.train_idx.size());
      for (std::size_t r : plan.train[b]) EXPECT_LT(r, d.train_idx.size());
      EXPECT_EQ(plan.eval[b], d.test_idx);
    }
    EXPECT_NE(plan.train[0], plan.train[1]);
  }
}

TEST(Bootstrap, SameSeedGivesByteIdenticalReports) {
  auto c = small_synth();
  const auto a = to_json(evaluate(c)).dump();
  EXPECT_EQ(a, to_json(evaluate(c)).dump());
  c.seed = 2;
  EXPECT_NE(a, to_json(evaluate(c)).dump());
}

TEST(Bootstrap, ReportMeanAndStdRecomputable) {
  auto c = small_synth();
  c.boot_runs = 7;
  const auto j = to_json(evaluate(c));
  std::vector<double> v;
  for (const auto& r : j["runs"])
    if (r["ok"].get<bool>()) v.push_back(r["auc"].get<double>());
  ASSERT_EQ(v.size(), 7u);
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double q = 0.0;
  for (double x : v) q += (x - m) * (x - m);
  EXPECT_NEAR(j["mean_auc"].get<double>(), m, 1e-12);
  EXPECT_NEAR(j["std_auc"].get<double>(), std::sqrt(q / static_cast<double>(v.size() - 1)), 1e-12);
  EXPECT_EQ(j["completed"].get<std::size_t>(), 7u);
  EXPECT_EQ(j["failed"].get<std::size_t>(), 0u);
}

TEST(Bootstrap, FailedRunsAreCountedAndExcluded) {
  auto c = small_synth();
  c.boot_runs = 5;
  const auto d = prepare_data(c);
  std::size_t calls = 0;
  const auto oracle = oracle_scorer(d);
  const Scorer flaky = [&](std::span<const std::size_t> tr, std::span<const std::size_t> ev) {
    if (calls++ % 2 == 1) throw Error(Errc::DegenerateSample, "injected");
    return oracle(tr, ev);
  };
  const auto rep = run_protocol(c, d, flaky);
  EXPECT_EQ(rep.failed, 2u);
  EXPECT_EQ(rep.mean, *rep.oracle_test_auc);
  EXPECT_FALSE(rep.runs[1].ok);
  EXPECT_NE(rep.runs[1].error.find("injected"), std::string::npos);
}

TEST(Bootstrap, CaseAFunctionalAtFivePercentClearsDeskFloor) {
  auto c = case_a();
  c.n_coeffs = 0;
  c.percent = 5.0;
  const auto rep = evaluate(c);
  EXPECT_EQ(rep.failed, 0u);
  EXPECT_GE(rep.mean, 0.75);
}

TEST(Holdout, OracleScorerMatchesOracleTestAuc) {
  auto c = small_synth();
  c.protocol = "holdout";
  const auto d = prepare_data(c);
  const auto rep = run_protocol(c, d, oracle_scorer(d));
  ASSERT_EQ(rep.runs.size(), 1u);
  EXPECT_EQ(rep.mean, *rep.oracle_test_auc);
}

// --------------------------------------------------------------------------
// V-fold

TEST(VFold, DegenerateFoldCountsRejected) {
  auto c = small_synth(30, 10);
  c.protocol = "v_fold";
  const auto d = prepare_data(c);
  for (std::size_t v : {std::size_t{1}, std::size_t{21}, d.all.size()}) {
    c.folds = v;
    EXPECT_EQ(code_of([&] { make_plan(c, d); }), Errc::InvalidProtocol) << v;
  }
}

TEST(VFold, StratifiedFoldsPartitionWithBalancedClasses) {
  auto c = small_synth(150, 53);
  c.protocol = "v_fold";
  const auto d = prepare_data(c);
  for (bool shuffle : {true, false})
    for (std::size_t v : {2u, 4u, 6u, 7u}) {
      c.folds = v;
      c.shuffle_folds = shuffle;
      const auto plan = make_plan(c, d);
      ASSERT_EQ(plan.eval.size(), v);
      std::vector<int> seen(d.all.size(), 0);
      std::vector<std::size_t> pos(v, 0), neg(v, 0);
      for (std::size_t f = 0; f < v; ++f) {
        EXPECT_EQ(plan.train[f].size() + plan.eval[f].size(), d.all.size());
        for (std::size_t r : plan.eval[f]) {
          ++seen[r];
          (d.all.labels[r] == Label::Positive ? pos : neg)[f] += 1;
        }
      }
      for (int s : seen) EXPECT_EQ(s, 1);
      EXPECT_LE(*std::max_element(pos.begin(), pos.end()) - *std::min_element(pos.begin(), pos.end()), 1u);
      EXPECT_LE(*std::max_element(neg.begin(), neg.end()) - *std::min_element(neg.begin(), neg.end()), 1u);
    }
}

TEST(VFold, OracleMeanMatchesWholeSetAuc) {
  auto c = small_synth(1000, 1000);
  c.protocol = "v_fold";
  const auto d = prepare_data(c);
  const double whole = empirical_auc(d.oracle, d.all.labels);
  for (std::size_t v : {2u, 4u, 6u, 10u}) {
    c.folds = v;
    const auto rep = run_protocol(c, d, oracle_scorer(d));
    EXPECT_EQ(rep.runs.size(), v);
    EXPECT_NEAR(rep.mean, whole, 0.03) << "V=" << v;
  }
}

TEST(VFold, DuplicatedHalvesGiveEqualFoldAucs) {
  const auto dir = scratch("dup");
  auto rng = make_rng(5);
  std::vector<std::string> rows;
  for (int i = 0; i < 40; ++i) {
    const int label = i % 2 ? 1 : -1;
    std::string line = std::to_string(label);
    for (int t = 0; t < 16; ++t)
      line += ',' + detail::format_double(normal(rng, 0.0, 1.0) + (label > 0 && t < 4 ? 0.8 : 0.0));
    rows.push_back(line);
  }
  std::string text;
  for (int copy = 0; copy < 2; ++copy)
    for (const auto& r : rows) text += r + '\n';
  write_text((dir / "dup.csv").string(), text);

  ExperimentConfig c;
  c.data.source = "csv";
  c.data.train_path = (dir / "dup.csv").string();
  c.protocol = "v_fold";
  c.folds = 2;
  c.shuffle_folds = false;
  c.n_coeffs = 4;
  c.grow.depth = 2;
  c.grow.min_split = 4;
  c.grow.leaf.min_node = 2;
  const auto rep = evaluate(c);
  ASSERT_EQ(rep.runs.size(), 2u);
  ASSERT_TRUE(rep.runs[0].ok && rep.runs[1].ok);
  EXPECT_EQ(rep.runs[0].auc, rep.runs[1].auc);
  EXPECT_EQ(rep.runs[0].roc.points, rep.runs[1].roc.points);
}

// --------------------------------------------------------------------------
// Paired comparison

TEST(Compare, FullDimensionGivesZeroDelta) {
  auto c = small_synth(150, 150, 64);
  c.data.synth.components = 8;
  c.n_coeffs = 0;
  c.percent = 100.0;
  auto b = c;
  b.learner = "filtered_treerank";
  const auto rep = compare_local_vs_global(c, b);
  EXPECT_TRUE(rep.hashes_identical);
  ASSERT_EQ(rep.delta.size(), c.boot_runs);
  for (double x : rep.delta) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(rep.mean_delta, 0.0);
}

TEST(Compare, SharedResamplesAndPairedDeltas) {
  auto c = small_synth();
  auto b = c;
  b.learner = "filtered_treerank";
  const auto rep = compare_local_vs_global(c, b);
  EXPECT_TRUE(rep.hashes_identical);
  for (std::size_t i = 0; i < rep.a.runs.size(); ++i) {
    EXPECT_EQ(rep.a.runs[i].index_hash, rep.b.runs[i].index_hash);
    EXPECT_EQ(rep.delta[i], rep.a.runs[i].auc - rep.b.runs[i].auc);
  }
  const auto j = to_json(rep);
  EXPECT_EQ(j["pairs"].size(), c.boot_runs);
  EXPECT_EQ(j["pairs"][0]["index_hash_a"], j["pairs"][0]["index_hash_b"]);
}

TEST(Compare, MismatchedConfigsRejected) {
  auto a = small_synth();
  auto b = a;
  b.learner = "filtered_treerank";
  b.protocol = "holdout";
  EXPECT_EQ(code_of([&] { compare_local_vs_global(a, b); }), Errc::ConfigMismatch);
  b = a;
  b.n_coeffs = 11;
  EXPECT_EQ(code_of([&] { compare_local_vs_global(a, b); }), Errc::ConfigMismatch);
}

TEST(Compare, CaseAHalfPercentFunctionalLeadsByFivePoints) {
  auto a = case_a();
  a.n_coeffs = 0;
  a.percent = 0.5;
  auto b = a;
  b.learner = "filtered_treerank";
  const auto rep = compare_local_vs_global(a, b);
  EXPECT_GE(rep.a.mean - rep.b.mean, 0.05) << rep.a.mean << " vs " << rep.b.mean;
}

// --------------------------------------------------------------------------
// CSV ingestion

TEST(Csv, FourByEightRoundTripsByteIdentical) {
  const auto dir = scratch("rt");
  const std::string text =
      "1,0.5,-1.25,3,0,1e-300,2.5,7,8\n"
      "-1,0.10000000000000001,0.2,0.29999999999999999,4,5,6,7,-8\n"
      "1,1,1,1,1,1,1,1,1\n"
      "-1,-0,3.1415926535897931,2,2,2,2,2,123456789\n";
  const auto path = (dir / "in.csv").string();
  write_text(path, text);
  const auto in = ingest_csv(path);
  EXPECT_EQ(in.pad(), 0u);
  write_csv((dir / "out.csv").string(), in.data);
  const auto out = read_text((dir / "out.csv").string());
  const auto again = ingest_csv((dir / "out.csv").string());
  EXPECT_EQ(format_csv(again.data), out);
  EXPECT_EQ(again.data.curves, in.data.curves);
  EXPECT_EQ(again.data.labels, in.data.labels);
  // canonical files reproduce exactly
  write_csv((dir / "out2.csv").string(), again.data);
  EXPECT_EQ(read_text((dir / "out2.csv").string()), out);
}

TEST(Csv, NonDyadicLengthPadsToNextPowerOfTwo) {
  std::string text;
  for (int r = 0; r < 4; ++r) {
    text += r % 2 ? "1" : "-1";
    for (int t = 0; t < 121; ++t) text += "," + std::to_string(t + r);
    text += '\n';
  }
  std::istringstream in(text);
  const auto res = parse_csv(in);
  EXPECT_EQ(res.raw_length, 121u);
  EXPECT_EQ(res.padded_length, 128u);
  EXPECT_EQ(res.pad(), 7u);
  for (const auto& c : res.data.curves) {
    ASSERT_EQ(c.size(), 128u);
    for (std::size_t t = 121; t < 128; ++t) EXPECT_EQ(c[t], 0.0);
  }
}

TEST(Csv, MultiSensorBlocksPadIndependently) {
  std::istringstream in("1,1,2,3,4,5,6,7,8,9,10\n0,0,0,0,0,0,0,0,0,0,0\n");
  const auto res = parse_csv(in, 2);
  EXPECT_EQ(res.raw_length, 5u);
  EXPECT_EQ(res.padded_length, 8u);
  EXPECT_EQ(res.data.sensors, 2u);
  const std::vector<double> want{1, 2, 3, 4, 5, 0, 0, 0, 6, 7, 8, 9, 10, 0, 0, 0};
  EXPECT_EQ(res.data.curves[0], want);
  EXPECT_EQ(res.data.labels[1], Label::Negative);
  std::istringstream odd("1,1,2,3\n");
  EXPECT_EQ(code_of([&] { parse_csv(odd, 2); }), Errc::FormatError);
}

TEST(Csv, MalformedInputs) {
  std::istringstream ragged("1,1,2,3\n-1,1,2\n");
  EXPECT_EQ(code_of([&] { parse_csv(ragged); }), Errc::FormatError);
  std::istringstream word("1,1,2,x\n-1,1,2,3\n");
  EXPECT_EQ(code_of([&] { parse_csv(word); }), Errc::ParseError);
  std::istringstream label("2,1,2\n");
  EXPECT_EQ(code_of([&] { parse_csv(label); }), Errc::ParseError);
  std::istringstream empty("");
  EXPECT_EQ(code_of([&] { parse_csv(empty); }), Errc::FormatError);
  EXPECT_EQ(code_of([] { ingest_csv("/nonexistent/ftr.csv"); }), Errc::IoError);
}

TEST(Csv, SingleClassWarnsAndTrainingFailsLoudly) {
  const auto dir = scratch("oneclass");
  std::string text;
  for (int r = 0; r < 12; ++r) text += "1," + std::to_string(r) + ",2,3,4\n";
  write_text((dir / "one.csv").string(), text);
  const auto res = ingest_csv((dir / "one.csv").string());
  ASSERT_EQ(res.warnings.size(), 1u);
  EXPECT_NE(res.warnings[0].find("single class"), std::string::npos);

  ExperimentConfig c;
  c.data.source = "csv";
  c.data.train_path = (dir / "one.csv").string();
  c.n_coeffs = 2;
  c.protocol = "holdout";
  const auto d = prepare_data(c);
  EXPECT_FALSE(d.warnings.empty());
  EXPECT_EQ(code_of([&] { fit_model(c, d, d.train_idx); }), Errc::DegenerateSample);
}

TEST(Csv, SynthExportReingestsWithIdenticalOracleAuc) {
  const auto dir = scratch("export");
  const auto c = small_synth(120, 80);
  export_synth_dataset(c, dir.string());
  const auto d = prepare_data(c);
  const auto side = Json::parse(read_text((dir / "dataset.json").string()));
  const auto te = ingest_csv((dir / "test.csv").string());
  const auto tr = ingest_csv((dir / "train.csv").string());
  ASSERT_EQ(te.data.size(), 80u);
  ASSERT_EQ(tr.data.size(), 120u);
  for (std::size_t i = 0; i < 80; ++i) {
    EXPECT_EQ(te.data.curves[i], d.all.curves[d.test_idx[i]]);
    EXPECT_EQ(te.data.labels[i], d.all.labels[d.test_idx[i]]);
  }
  const auto oracle = side["test"]["oracle_scores"].get<std::vector<double>>();
  const auto rep = run_protocol(
      [&] {
        auto h = c;
        h.protocol = "holdout";
        return h;
      }(),
      d, oracle_scorer(d));
  EXPECT_EQ(empirical_auc(oracle, te.data.labels), *rep.oracle_test_auc);
  EXPECT_EQ(spec_from_json(side["spec"]).omega_plus, d.spec->omega_plus);
}

// --------------------------------------------------------------------------
// Plots

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) r.push_back(std::stod(tok));
    rows.push_back(r);
  }
  return rows;
}

TEST(Plots, SingleRunHasOneRocPolylineAndOptionalOracle) {
  const auto dir = scratch("one");
  auto c = small_synth();
  c.boot_runs = 1;
  const auto rep = evaluate(c);
  emit_plots(rep, dir.string());
  const auto svg = read_text((dir / "roc.svg").string());
  EXPECT_EQ(count(svg, "<polyline class=\"roc\""), 1u);
  EXPECT_EQ(count(svg, "class=\"envelope\""), 0u);
  EXPECT_EQ(count(svg, "class=\"mean\""), 0u);
  EXPECT_EQ(count(svg, "<polyline class=\"optimal\""), 1u);
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_TRUE(fs::exists(dir / "optimal_roc.csv"));
}

TEST(Plots, EnvelopeNonnegativeAndCsvAreasMatchReport) {
  const auto dir = scratch("many");
  auto c = small_synth();
  c.boot_runs = 5;
  const auto rep = evaluate(c);
  emit_plots(rep, dir.string());

  const auto env = read_numeric_csv((dir / "roc_envelope.csv").string());
  ASSERT_EQ(env.size(), c.envelope_grid);
  for (const auto& r : env) {
    EXPECT_LE(r[1], r[2] + 1e-15);
    EXPECT_LE(r[2], r[3] + 1e-15);
    EXPECT_GE(r[3] - r[1], 0.0);
  }

  std::vector<RocCurve> curves(rep.runs.size());
  for (const auto& r : read_numeric_csv((dir / "roc_runs.csv").string()))
    curves[static_cast<std::size_t>(r[0])].points.push_back({r[1], r[2]});
  for (std::size_t i = 0; i < rep.runs.size(); ++i) EXPECT_NEAR(trapezoid_area(curves[i]), rep.runs[i].auc, 1e-9);

  RocCurve opt;
  for (const auto& r : read_numeric_csv((dir / "optimal_roc.csv").string())) opt.points.push_back({r[0], r[1]});
  EXPECT_NEAR(trapezoid_area(opt), *rep.optimal_auc, 1e-9);

  const auto svg = read_text((dir / "roc.svg").string());
  EXPECT_EQ(count(svg, "<polyline class=\"roc\""), 5u);
  EXPECT_EQ(count(svg, "<polygon class=\"envelope\""), 1u);
  EXPECT_EQ(count(svg, "<polyline class=\"mean\""), 1u);
}

TEST(Plots, UnwritableDirectoryIsIoError) {
  const auto dir = scratch("blocked");
  write_text((dir / "file").string(), "x");
  auto c = small_synth();
  c.boot_runs = 1;
  c.protocol = "holdout";
  const auto d = prepare_data(c);
  const auto rep = run_protocol(c, d, oracle_scorer(d));
  EXPECT_EQ(code_of([&] { emit_plots(rep, (dir / "file" / "sub").string()); }), Errc::IoError);
}

// --------------------------------------------------------------------------
// CLI

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FTR_CLI) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const std::string cfg = std::string(FTR_CONFIG_DIR) + "/case_a_functional.json";
  const std::string small = " --set data.n_train=60 --set data.n_test=60 --set data.synth.length=256"
                            " --set filter.j=8 --set protocol.B=2";
  EXPECT_EQ(run_cli("evaluate -c " + cfg + small + " -o " + (dir / "ok").string()), 0);
  EXPECT_EQ(run_cli("evaluate -c " + cfg + " --set learner.kind=svm -o " + (dir / "x").string()), 2);
  EXPECT_EQ(run_cli("evaluate -c " + cfg + " --set protocol.bogus=1 -o " + (dir / "x").string()), 2);
  EXPECT_EQ(run_cli("evaluate --bad-flag"), 2);
  EXPECT_EQ(run_cli("evaluate -c " + cfg + small + " --set protocol.kind=v_fold --set protocol.V=500 -o " +
                    (dir / "x").string()),
            2);
  EXPECT_EQ(run_cli("evaluate -c " + cfg +
                    " --set data.source=csv --set data.train=/nonexistent/a.csv -o " + (dir / "x").string()),
            3);
  write_text((dir / "ragged.csv").string(), "1,1,2\n-1,1\n");
  EXPECT_EQ(run_cli("score -t " + (dir / "tree.json").string() + " -d " + (dir / "ragged.csv").string()), 3);
  EXPECT_EQ(run_cli("train -c " + cfg + small + " -o " + (dir / "tree.json").string()), 0);
  EXPECT_EQ(run_cli("score -t " + (dir / "tree.json").string() + " -d " + (dir / "ragged.csv").string()), 3);
  EXPECT_EQ(run_cli("evaluate -c " + cfg + small + " --set data.synth.target_auc=0.5 -o " + (dir / "x").string()), 4);
}

}  // namespace
