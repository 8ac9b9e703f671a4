#pragma once

// Curve CSV files: one observation per row, label first, then samples.
// Labels are -1/+1 (0 is read as -1). A row may hold several sensors laid
// out as consecutive equal-length blocks; each block is zero-padded to the
// next power of two on ingestion.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ftr/error.hpp"
#include "ftr/metrics.hpp"
#include "ftr/treerank.hpp"
#include "ftr/wavelet.hpp"

namespace ftr {

struct IngestResult {
  LabeledCurveSet data;
  std::size_t raw_length = 0;     // per sensor, as read
  std::size_t padded_length = 0;  // per sensor, after padding
  std::vector<std::string> warnings;

  std::size_t pad() const { return padded_length - raw_length; }
};

namespace detail {

inline double parse_number(std::string_view tok, std::size_t line) {
  while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
  while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size())
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": '" + std::string(tok) + "' is not a number");
  return v;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline IngestResult parse_csv(std::istream& in, std::size_t sensors = 1) {
  if (sensors < 1) throw Error(Errc::ConfigError, "sensor count must be positive");
  IngestResult res;
  std::string line;
  std::size_t lineno = 0, width = 0;
  std::vector<std::vector<double>> raw;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    std::vector<double> vals;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      vals.push_back(detail::parse_number(std::string_view(line).substr(start, comma - start), lineno));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (width == 0) width = vals.size();
    if (vals.size() != width)
      throw Error(Errc::FormatError, "line " + std::to_string(lineno) + " has " + std::to_string(vals.size()) +
                                         " fields, expected " + std::to_string(width));
    const double lab = vals.front();
    if (lab != 1.0 && lab != -1.0 && lab != 0.0)
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": label must be -1, 0 or 1");
    res.data.labels.push_back(label_from_int(static_cast<long>(lab)));
    vals.erase(vals.begin());
    for (double v : vals)
      if (!std::isfinite(v)) throw Error(Errc::DataError, "line " + std::to_string(lineno) + ": non-finite sample");
    raw.push_back(std::move(vals));
  }
  if (raw.empty()) throw Error(Errc::FormatError, "no observations");
  const std::size_t total = raw.front().size();
  if (total == 0 || total % sensors != 0)
    throw Error(Errc::FormatError, std::to_string(total) + " samples per row not divisible into " +
                                       std::to_string(sensors) + " sensors");
  res.raw_length = total / sensors;
  res.padded_length = std::max<std::size_t>(2, next_power_of_two(res.raw_length));
  res.data.sensors = sensors;
  for (auto& r : raw) {
    std::vector<double> c(sensors * res.padded_length, 0.0);
    for (std::size_t s = 0; s < sensors; ++s)
      std::copy(r.begin() + static_cast<std::ptrdiff_t>(s * res.raw_length),
                r.begin() + static_cast<std::ptrdiff_t>((s + 1) * res.raw_length),
                c.begin() + static_cast<std::ptrdiff_t>(s * res.padded_length));
    res.data.curves.push_back(std::move(c));
  }
  std::size_t pos = 0;
  for (Label l : res.data.labels) pos += l == Label::Positive;
  if (pos == 0 || pos == res.data.labels.size()) res.warnings.push_back("dataset contains a single class");
  return res;
}

inline IngestResult ingest_csv(const std::string& path, std::size_t sensors = 1) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return parse_csv(in, sensors);
}

inline std::string format_csv(const LabeledCurveSet& d) {
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out += std::to_string(to_int(d.labels[i]));
    for (double v : d.curves[i]) {
      out += ',';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_csv(const std::string& path, const LabeledCurveSet& d) { write_text(path, format_csv(d)); }

}  // namespace ftr
