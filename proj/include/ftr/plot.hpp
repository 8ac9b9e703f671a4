#pragma once

// CSV and SVG artifacts for evaluation reports, plus synthetic dataset export.

#include <filesystem>
#include <string>
#include <vector>

#include "ftr/harness.hpp"
#include "ftr/io.hpp"

namespace ftr {

namespace detail {

inline std::string svg_points(const RocCurve& c, double size, double pad) {
  std::string out;
  for (const auto& p : c.points) {
    if (!out.empty()) out += ' ';
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", pad + p.fpr * size, pad + (1.0 - p.tpr) * size);
    out += buf;
  }
  return out;
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw Error(Errc::IoError, "cannot create directory '" + dir + "'");
}

}  // namespace detail

struct PlotFiles {
  std::vector<std::string> paths;
};

/// Writes roc_runs.csv (run,fpr,tpr), roc_envelope.csv (fpr,lower,mean,upper),
/// optimal_roc.csv when the generating spec is known, and roc.svg.
inline PlotFiles emit_plots(const EvaluationReport& r, const std::string& out_dir) {
  detail::ensure_dir(out_dir);
  PlotFiles files;
  const auto put = [&](const std::string& name, const std::string& text) {
    const auto path = (std::filesystem::path(out_dir) / name).string();
    write_text(path, text);
    files.paths.push_back(path);
  };
  using detail::format_double;

  std::string runs = "run,fpr,tpr\n";
  for (const auto& x : r.runs) {
    if (!x.ok) continue;
    for (const auto& p : x.roc.points)
      runs += std::to_string(x.run) + ',' + format_double(p.fpr) + ',' + format_double(p.tpr) + '\n';
  }
  put("roc_runs.csv", runs);

  if (r.envelope) {
    std::string env = "fpr,lower,mean,upper\n";
    const auto& e = *r.envelope;
    for (std::size_t i = 0; i < e.mean.points.size(); ++i)
      env += format_double(e.mean.points[i].fpr) + ',' + format_double(e.lower.points[i].tpr) + ',' +
             format_double(e.mean.points[i].tpr) + ',' + format_double(e.upper.points[i].tpr) + '\n';
    put("roc_envelope.csv", env);
  }

  std::optional<RocCurve> optimal;
  if (r.spec) {
    optimal = optimal_roc(*r.spec);
    std::string opt = "fpr,tpr\n";
    for (const auto& p : optimal->points) opt += format_double(p.fpr) + ',' + format_double(p.tpr) + '\n';
    put("optimal_roc.csv", opt);
  }

  constexpr double size = 400.0, pad = 40.0;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n";
  svg += "<rect x=\"40\" y=\"40\" width=\"400\" height=\"400\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<line x1=\"40\" y1=\"440\" x2=\"440\" y2=\"40\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n";
  svg += "<text x=\"240\" y=\"470\" text-anchor=\"middle\" font-size=\"14\">false positive rate</text>\n";
  svg += "<text x=\"14\" y=\"240\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 14 240)\">"
         "true positive rate</text>\n";
  std::size_t ok_runs = 0;
  for (const auto& x : r.runs) ok_runs += x.ok;
  if (r.envelope && ok_runs > 1) {
    RocCurve band = r.envelope->upper;
    for (auto it = r.envelope->lower.points.rbegin(); it != r.envelope->lower.points.rend(); ++it)
      band.points.push_back(*it);
    svg += "<polygon class=\"envelope\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"" +
           detail::svg_points(band, size, pad) + "\"/>\n";
  }
  for (const auto& x : r.runs) {
    if (!x.ok) continue;
    svg += "<polyline class=\"roc\" fill=\"none\" stroke=\"#3182bd\" stroke-opacity=\"0.4\" points=\"" +
           detail::svg_points(x.roc, size, pad) + "\"/>\n";
  }
  if (r.envelope && ok_runs > 1)
    svg += "<polyline class=\"mean\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"" +
           detail::svg_points(r.envelope->mean, size, pad) + "\"/>\n";
  if (optimal)
    svg += "<polyline class=\"optimal\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" points=\"" +
           detail::svg_points(*optimal, size, pad) + "\"/>\n";
  svg += "</svg>\n";
  put("roc.svg", svg);
  return files;
}

inline LabeledCurveSet curves_of(const std::vector<OracleSample>& s) { return to_curve_set(s); }

/// train.csv, test.csv and dataset.json (spec, seeds, per-row component and
/// oracle score).
inline PlotFiles export_synth_dataset(const ExperimentConfig& c, const std::string& out_dir) {
  detail::ensure_dir(out_dir);
  const auto d = make_synth(c);
  PlotFiles files;
  const auto path = [&](const char* name) { return (std::filesystem::path(out_dir) / name).string(); };
  write_csv(path("train.csv"), to_curve_set(d.train));
  write_csv(path("test.csv"), to_curve_set(d.test));
  const auto meta = [](const std::vector<OracleSample>& s) {
    Json comp = Json::array(), orc = Json::array();
    for (const auto& o : s) {
      comp.push_back(o.component);
      orc.push_back(o.oracle_score);
    }
    return Json{{"components", comp}, {"oracle_scores", orc}};
  };
  const auto seed = synth_seed(c);
  Json side = {{"spec", to_json(d.spec)},
               {"seed", seed},
               {"train_seed", derive_seed(seed, {10})},
               {"test_seed", derive_seed(seed, {11})},
               {"train", meta(d.train)},
               {"test", meta(d.test)}};
  write_text(path("dataset.json"), side.dump(2) + "\n");
  files.paths = {path("train.csv"), path("test.csv"), path("dataset.json")};
  return files;
}

}  // namespace ftr
