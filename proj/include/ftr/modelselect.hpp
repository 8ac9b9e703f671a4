#pragma once

// Choice of the filter dimension N by penalized training AUC:
//   CPAUC(N) = AUC_n(N) - 4 sqrt((V_N ln(n+1) + ln 2) / n),  V_N = c_V N.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ftr/error.hpp"
#include "ftr/filtering.hpp"
#include "ftr/metrics.hpp"
#include "ftr/treerank.hpp"

namespace ftr {

struct PenaltySchedule {
  double c_v = 1.0;
  bool disabled = false;  // pen = 0

  double vc_dim(std::size_t n_dim) const { return c_v * static_cast<double>(n_dim); }
};

inline double penalty(std::size_t n_dim, std::size_t n, const PenaltySchedule& s = {}) {
  if (n < 1 || n_dim < 1) throw Error(Errc::InvalidCount, "penalty needs N >= 1 and n >= 1");
  if (!(s.c_v > 0.0)) throw Error(Errc::InvalidCount, "VC proportionality constant must be positive");
  if (s.disabled) return 0.0;
  const double nd = static_cast<double>(n);
  return 4.0 * std::sqrt((s.vc_dim(n_dim) * std::log(nd + 1.0) + std::log(2.0)) / nd);
}

struct SelectionRow {
  std::size_t n_dim = 0;
  double auc = 0.0;
  double pen = 0.0;
  double cpauc = 0.0;
  bool ok = false;
  std::string error;
};

struct SelectionReport {
  std::vector<SelectionRow> rows;  // ascending N
  std::size_t selected = 0;
};

/// Fits one functional tree per candidate N on `rows` of `table` and keeps
/// the maximizer of CPAUC; ties go to the smaller N.
inline SelectionReport select_dimension(const CoefficientTable& table, Family family, std::span<const Label> y,
                                        std::span<const std::size_t> rows, std::vector<std::size_t> candidates,
                                        const FilterParams& filter, const GrowParams& grow,
                                        const PenaltySchedule& sched = {}) {
  if (candidates.empty()) throw Error(Errc::SelectionFailed, "no candidate dimensions");
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  SelectionReport rep;
  std::vector<Label> ly;
  for (std::size_t r : rows) ly.push_back(y[r]);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t n_dim : candidates) {
    SelectionRow row;
    row.n_dim = n_dim;
    try {
      FilterParams f = filter;
      f.mode = SelectionMode::TopVariance;
      f.n_coeffs = n_dim;
      const auto tree = grow_functional(table, family, y, rows, f, grow);
      const auto scores = score_rows(tree, [&](std::size_t r) { return table.row(r); }, rows);
      row.auc = empirical_auc(scores, ly);
      row.pen = penalty(n_dim, rows.size(), sched);
      row.cpauc = row.auc - row.pen;
      row.ok = true;
      if (row.cpauc > best) {
        best = row.cpauc;
        rep.selected = n_dim;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    rep.rows.push_back(row);
  }
  if (rep.selected == 0) throw Error(Errc::SelectionFailed, "every candidate dimension failed");
  return rep;
}

inline SelectionReport select_dimension(const CoefficientTable& table, Family family, std::span<const Label> y,
                                        std::vector<std::size_t> candidates, const FilterParams& filter,
                                        const GrowParams& grow, const PenaltySchedule& sched = {}) {
  const auto rows = all_rows(table);
  return select_dimension(table, family, y, rows, std::move(candidates), filter, grow, sched);
}

}  // namespace ftr
