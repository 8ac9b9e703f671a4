#pragma once

// Dimension reduction of curve ensembles by wavelet-coefficient selection.
//
// Three ways of choosing a projection filter: the linear level-j projection,
// the N coefficients with largest empirical second moment, and hard
// thresholding of those moments. A filter is an ordered list of coefficient
// indices; applying it reads the matching coefficients out of a transformed
// curve.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftr/error.hpp"
#include "ftr/wavelet.hpp"

namespace ftr {

/// Coefficient address. `sensor` is 0 for single-channel curves; j = j0 - 1
/// denotes a scaling coefficient.
struct WaveletIndex {
  int sensor = 0;
  int j = 0;
  std::size_t k = 0;

  auto operator<=>(const WaveletIndex&) const = default;
};

enum class SelectionMode { Linear, TopVariance, Threshold };

inline std::string to_string(SelectionMode m) {
  switch (m) {
    case SelectionMode::Linear: return "linear";
    case SelectionMode::TopVariance: return "top_variance";
    case SelectionMode::Threshold: return "threshold";
  }
  return "unknown";
}

inline SelectionMode selection_mode_from_string(const std::string& s) {
  if (s == "linear") return SelectionMode::Linear;
  if (s == "top_variance") return SelectionMode::TopVariance;
  if (s == "threshold") return SelectionMode::Threshold;
  throw Error(Errc::ConfigError, "unknown selection mode '" + s + "'");
}

struct FilterIndexSet {
  std::vector<WaveletIndex> indices;
  int j0 = 0;
  int jmax_used = 0;
  SelectionMode mode = SelectionMode::Linear;
  std::optional<Family> family;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }

  /// Same index set in (sensor, j, k) order. Learners consume features in
  /// this order so that their tie-breaking does not depend on how the
  /// selection statistic happened to rank the indices.
  FilterIndexSet canonical() const {
    FilterIndexSet out = *this;
    std::sort(out.indices.begin(), out.indices.end());
    return out;
  }

  friend bool operator==(const FilterIndexSet&, const FilterIndexSet&) = default;
};

/// Coefficients of an ensemble, one row per observation. Each row holds
/// `sensors` consecutive pyramid-ordered blocks of 2^(jmax+1) values.
class CoefficientTable {
 public:
  CoefficientTable() = default;
  CoefficientTable(int j0, int jmax, std::size_t sensors = 1)
      : j0_(j0), jmax_(jmax), sensors_(sensors), block_(std::size_t{1} << (jmax + 1)) {}

  int j0() const { return j0_; }
  int jmax() const { return jmax_; }
  std::size_t sensors() const { return sensors_; }
  std::size_t block_size() const { return block_; }
  std::size_t rows() const { return block_ == 0 ? 0 : data_.size() / cols(); }
  std::size_t cols() const { return sensors_ * block_; }

  /// Relative floor the rows were cleaned with (0 = raw transforms).
  double coefficient_floor() const { return floor_; }
  void set_coefficient_floor(double f) { floor_ = f; }

  void add_row(std::span<const double> flat) {
    if (flat.size() != cols())
      throw Error(Errc::IndexMismatch, "row of " + std::to_string(flat.size()) + " coefficients, expected " +
                                           std::to_string(cols()));
    data_.insert(data_.end(), flat.begin(), flat.end());
  }

  void add_row(const CoefficientSet& c) {
    if (c.j0 != j0_ || c.jmax != jmax_)
      throw Error(Errc::IndexMismatch, "coefficient set scales do not match the table");
    add_row(std::span<const double>(c.data));
  }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols(), cols());
  }

  double value(std::size_t i, std::size_t col) const { return data_[i * cols() + col]; }

  bool contains(const WaveletIndex& idx) const {
    if (idx.sensor < 0 || static_cast<std::size_t>(idx.sensor) >= sensors_) return false;
    if (idx.j == j0_ - 1) return idx.k < (std::size_t{1} << j0_);
    return idx.j >= j0_ && idx.j <= jmax_ && idx.k < (std::size_t{1} << idx.j);
  }

  std::size_t column(const WaveletIndex& idx) const {
    if (!contains(idx))
      throw Error(Errc::IndexMismatch, "index (" + std::to_string(idx.sensor) + "," + std::to_string(idx.j) +
                                           "," + std::to_string(idx.k) + ") not in coefficient range");
    const std::size_t local = idx.j == j0_ - 1 ? idx.k : (std::size_t{1} << idx.j) + idx.k;
    return static_cast<std::size_t>(idx.sensor) * block_ + local;
  }

  WaveletIndex index_at(std::size_t col) const {
    WaveletIndex idx;
    idx.sensor = static_cast<int>(col / block_);
    const std::size_t local = col % block_;
    if (local < (std::size_t{1} << j0_)) {
      idx.j = j0_ - 1;
      idx.k = local;
    } else {
      idx.j = static_cast<int>(std::bit_width(local)) - 1;
      idx.k = local - (std::size_t{1} << idx.j);
    }
    return idx;
  }

  /// Columns with j0 - 1 <= j <= jmax_pool, in canonical order.
  std::vector<std::size_t> pool(int jmax_pool) const {
    if (jmax_pool > jmax_)
      throw Error(Errc::InvalidScale, "pool level " + std::to_string(jmax_pool) + " exceeds jmax " +
                                          std::to_string(jmax_));
    std::vector<std::size_t> cols_out;
    if (jmax_pool < j0_ - 1) return cols_out;
    const std::size_t per_sensor = std::size_t{1} << (jmax_pool + 1);
    const std::size_t used = jmax_pool < j0_ ? (std::size_t{1} << j0_) : per_sensor;
    for (std::size_t s = 0; s < sensors_; ++s)
      for (std::size_t c = 0; c < used; ++c) cols_out.push_back(s * block_ + c);
    return cols_out;
  }

  static CoefficientTable from_sets(std::span<const CoefficientSet> sets) {
    if (sets.empty()) throw Error(Errc::EmptyEnsemble, "no coefficient sets");
    CoefficientTable t(sets.front().j0, sets.front().jmax, 1);
    for (const auto& c : sets) t.add_row(c);
    return t;
  }

 private:
  int j0_ = 0;
  int jmax_ = 0;
  std::size_t sensors_ = 1;
  std::size_t block_ = 0;
  double floor_ = 0.0;
  std::vector<double> data_;
};

/// Zeroes coefficients smaller than `floor_rel` times the block's L2 norm.
/// Removes the roundoff residue an orthonormal round trip leaves on
/// coefficients that are zero in exact arithmetic; scale invariant.
inline void apply_coefficient_floor(std::span<double> block, double floor_rel) {
  if (floor_rel <= 0.0) return;
  long double e = 0.0L;
  for (double v : block) e += static_cast<long double>(v) * v;
  const double cut = floor_rel * std::sqrt(static_cast<double>(e));
  for (double& v : block)
    if (std::abs(v) < cut) v = 0.0;
}

/// Transforms multi-sensor observations (each row is `sensors` consecutive
/// dyadic blocks) into a coefficient table.
inline CoefficientTable transform_rows(std::span<const std::vector<double>> rows, std::size_t sensors,
                                       const WaveletFamily& family, int j0, double floor_rel = 0.0) {
  if (rows.empty()) throw Error(Errc::EmptyEnsemble, "no curves to transform");
  if (sensors == 0 || rows.front().size() % sensors != 0)
    throw Error(Errc::InvalidLength, "row length not divisible by sensor count");
  const std::size_t len = rows.front().size() / sensors;
  if (len < 2 || !is_power_of_two(len))
    throw Error(Errc::InvalidLength, "sensor length " + std::to_string(len) + " is not a power of two");
  CoefficientTable table(j0, log2_exact(len) - 1, sensors);
  table.set_coefficient_floor(floor_rel);
  std::vector<double> flat(sensors * len);
  for (const auto& r : rows) {
    if (r.size() != sensors * len) throw Error(Errc::InvalidLength, "ragged curve ensemble");
    for (std::size_t s = 0; s < sensors; ++s) {
      auto c = dwt_forward(std::span<const double>(r).subspan(s * len, len), family, j0);
      std::copy(c.data.begin(), c.data.end(), flat.begin() + static_cast<std::ptrdiff_t>(s * len));
      apply_coefficient_floor(std::span<double>(flat).subspan(s * len, len), floor_rel);
    }
    table.add_row(flat);
  }
  return table;
}

/// Empirical second moments (1/m) sum_i beta_i^2 of the given columns over
/// the given rows. Accumulated in long double so that the result does not
/// depend on row order except in the last bits.
inline std::vector<double> second_moments(const CoefficientTable& table, std::span<const std::size_t> rows,
                                          std::span<const std::size_t> cols) {
  if (rows.empty()) throw Error(Errc::EmptyEnsemble, "second moments of an empty cell");
  std::vector<long double> acc(cols.size(), 0.0L);
  for (std::size_t r : rows) {
    const auto row = table.row(r);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const long double v = row[cols[c]];
      acc[c] += v * v;
    }
  }
  std::vector<double> out(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c)
    out[c] = static_cast<double>(acc[c] / static_cast<long double>(rows.size()));
  return out;
}

inline std::vector<std::size_t> all_rows(const CoefficientTable& t) {
  std::vector<std::size_t> r(t.rows());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = i;
  return r;
}

/// Scaling coefficients at j0 plus detail levels j0..j-1: 2^j indices.
inline FilterIndexSet linear_index_set(int j, int j0, std::size_t sensors = 1) {
  if (j0 < 0 || j < j0)
    throw Error(Errc::InvalidScale, "linear filter needs 0 <= j0 <= j (j=" + std::to_string(j) +
                                        ", j0=" + std::to_string(j0) + ")");
  FilterIndexSet f;
  f.j0 = j0;
  f.jmax_used = j - 1;
  f.mode = SelectionMode::Linear;
  for (std::size_t s = 0; s < sensors; ++s) {
    for (std::size_t k = 0; k < (std::size_t{1} << j0); ++k) f.indices.push_back({static_cast<int>(s), j0 - 1, k});
    for (int lvl = j0; lvl < j; ++lvl)
      for (std::size_t k = 0; k < (std::size_t{1} << lvl); ++k)
        f.indices.push_back({static_cast<int>(s), lvl, k});
  }
  return f;
}

namespace detail {

// Orders candidate columns by decreasing statistic, ties by index.
inline std::vector<std::size_t> rank_by_statistic(const std::vector<double>& stat) {
  std::vector<std::size_t> order(stat.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&stat](std::size_t a, std::size_t b) { return stat[a] > stat[b]; });
  return order;
}

}  // namespace detail

/// The N coefficients in [j0-1, jmax] with largest empirical second moment
/// over `rows`. Output order: decreasing moment, ties by (sensor, j, k).
inline FilterIndexSet top_variance_index_set(const CoefficientTable& table, std::span<const std::size_t> rows,
                                             std::size_t n_keep, int jmax) {
  if (rows.empty()) throw Error(Errc::EmptyEnsemble, "top-variance selection on an empty ensemble");
  const auto pool = table.pool(jmax);
  if (n_keep < 1 || n_keep > pool.size())
    throw Error(Errc::InvalidCount, "cannot keep " + std::to_string(n_keep) + " of " +
                                        std::to_string(pool.size()) + " coefficients");
  const auto moments = second_moments(table, rows, pool);
  const auto order = detail::rank_by_statistic(moments);
  FilterIndexSet f;
  f.j0 = table.j0();
  f.jmax_used = jmax;
  f.mode = SelectionMode::TopVariance;
  f.indices.reserve(n_keep);
  for (std::size_t i = 0; i < n_keep; ++i) f.indices.push_back(table.index_at(pool[order[i]]));
  return f;
}

inline FilterIndexSet top_variance_index_set(std::span<const CoefficientSet> sets, std::size_t n_keep, int j0,
                                             int jmax) {
  if (sets.empty()) throw Error(Errc::EmptyEnsemble, "top-variance selection on an empty ensemble");
  if (sets.front().j0 != j0) throw Error(Errc::IndexMismatch, "coefficient sets were computed with another j0");
  const auto table = CoefficientTable::from_sets(sets);
  const auto rows = all_rows(table);
  return top_variance_index_set(table, rows, n_keep, jmax);
}

struct ThresholdParams {
  double target_n = 1.0;   // N in the threshold sqrt(j / N^(r+1))
  double smoothness = 1.0; // r
  double level_constant = 1.5;  // c in j <= c log2 N
};

/// Level cap min(jmax_cap, ceil(c log2 N)).
inline int threshold_level_cap(const ThresholdParams& p, int jmax_cap) {
  const double cap = std::ceil(p.level_constant * std::log2(p.target_n));
  if (cap >= static_cast<double>(jmax_cap)) return jmax_cap;
  return static_cast<int>(cap);
}

/// Threshold applied to the second moment of a level-j coefficient.
inline double threshold_level(const ThresholdParams& p, int j, int j0) {
  const double j_eff = std::max(j - j0 + 1, 1);
  return std::sqrt(j_eff / std::pow(p.target_n, p.smoothness + 1.0));
}

/// Every coefficient with j <= level cap whose empirical second moment
/// clears the level-dependent threshold.
inline FilterIndexSet threshold_index_set(const CoefficientTable& table, std::span<const std::size_t> rows,
                                          const ThresholdParams& p, int jmax_cap) {
  if (rows.empty()) throw Error(Errc::EmptyEnsemble, "threshold selection on an empty ensemble");
  if (!(p.target_n >= 1.0)) throw Error(Errc::InvalidCount, "threshold target N must be >= 1");
  if (!(p.smoothness > 0.0)) throw Error(Errc::InvalidCount, "smoothness r must be positive");
  const int cap = threshold_level_cap(p, std::min(jmax_cap, table.jmax()));
  const auto pool = table.pool(cap);
  const auto moments = second_moments(table, rows, pool);
  std::vector<double> kept_stat;
  std::vector<std::size_t> kept_cols;
  for (std::size_t c = 0; c < pool.size(); ++c) {
    const auto idx = table.index_at(pool[c]);
    if (moments[c] >= threshold_level(p, idx.j, table.j0())) {
      kept_stat.push_back(moments[c]);
      kept_cols.push_back(pool[c]);
    }
  }
  const auto order = detail::rank_by_statistic(kept_stat);
  FilterIndexSet f;
  f.j0 = table.j0();
  f.jmax_used = cap;
  f.mode = SelectionMode::Threshold;
  for (std::size_t i : order) f.indices.push_back(table.index_at(kept_cols[i]));
  return f;
}

inline FilterIndexSet threshold_index_set(std::span<const CoefficientSet> sets, const ThresholdParams& p, int j0,
                                          int jmax_cap) {
  if (sets.empty()) throw Error(Errc::EmptyEnsemble, "threshold selection on an empty ensemble");
  if (sets.front().j0 != j0) throw Error(Errc::IndexMismatch, "coefficient sets were computed with another j0");
  const auto table = CoefficientTable::from_sets(sets);
  const auto rows = all_rows(table);
  return threshold_index_set(table, rows, p, jmax_cap);
}

/// Column positions of a filter's indices in a table, in filter order.
inline std::vector<std::size_t> filter_columns(const CoefficientTable& table, const FilterIndexSet& filter) {
  if (filter.j0 != table.j0())
    throw Error(Errc::IndexMismatch, "filter j0 " + std::to_string(filter.j0) + " differs from table j0 " +
                                         std::to_string(table.j0()));
  std::vector<std::size_t> cols;
  cols.reserve(filter.size());
  for (const auto& idx : filter.indices) cols.push_back(table.column(idx));
  return cols;
}

inline std::vector<double> apply_filter(std::span<const double> flat_row, std::span<const std::size_t> cols) {
  std::vector<double> out;
  out.reserve(cols.size());
  for (std::size_t c : cols) out.push_back(flat_row[c]);
  return out;
}

/// values[l] = beta at filter.indices[l].
inline std::vector<double> apply_filter(const CoefficientSet& coeffs, const FilterIndexSet& filter) {
  std::vector<double> out;
  out.reserve(filter.size());
  for (const auto& idx : filter.indices) {
    if (idx.sensor != 0 || idx.j < coeffs.j0 - 1 || !coeffs.contains(idx.j, idx.k) || filter.j0 != coeffs.j0)
      throw Error(Errc::IndexMismatch, "filter index (" + std::to_string(idx.j) + "," + std::to_string(idx.k) +
                                           ") not present in coefficient set");
    out.push_back(coeffs.beta(idx.j, idx.k));
  }
  return out;
}

/// Squared L2 error between a curve and its reconstruction from the
/// coefficients the filter retains.
inline double distortion(const Curve& curve, const FilterIndexSet& filter, const WaveletFamily& family) {
  const auto coeffs = dwt_forward(curve, family, filter.j0);
  auto kept = CoefficientSet::zeros(coeffs.j0, coeffs.jmax);
  for (const auto& idx : filter.indices) {
    if (idx.sensor != 0 || !coeffs.contains(idx.j, idx.k))
      throw Error(Errc::IndexMismatch, "filter index (" + std::to_string(idx.j) + "," + std::to_string(idx.k) +
                                           ") not present in coefficient set");
    kept.at(idx.j, idx.k) = coeffs.beta(idx.j, idx.k);
  }
  const auto approx = dwt_inverse(kept, family);
  double err = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double d = curve[i] - approx[i];
    err += d * d;
  }
  return err;
}

}  // namespace ftr
