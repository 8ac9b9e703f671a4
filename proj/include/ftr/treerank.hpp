#pragma once

// Ranking trees: TreeRank over fixed feature vectors and its functional
// variant that re-selects wavelet coefficients inside every cell.
//
// Both learners share one grower. A cell is split by a LeafRank classifier
// trained with cost omega = (positives in cell) / (cell size); the region it
// labels +1 becomes the left child. Leaves read left to right carry scores
// L, L-1, ..., 1 for a tree with L leaves.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "ftr/error.hpp"
#include "ftr/filtering.hpp"
#include "ftr/leafrank.hpp"
#include "ftr/matrix.hpp"
#include "ftr/metrics.hpp"
#include "ftr/random.hpp"
#include "ftr/wavelet.hpp"

namespace ftr {

struct GrowParams {
  int depth = 4;
  std::size_t min_split = 20;
  LeafRankParams leaf{};
};

/// Filter choice for functional and globally filtered learners.
struct FilterParams {
  SelectionMode mode = SelectionMode::TopVariance;
  std::size_t n_coeffs = 20;  // N for top-variance
  int j = -1;                 // finest level + 1 of the coefficient pool; -1 = whole pyramid
  ThresholdParams threshold{};
};

/// Pyramid layout of the coefficient rows a functional tree reads.
struct CoefficientLayout {
  Family family = Family::Haar;
  int j0 = 0;
  int jmax = 0;
  std::size_t sensors = 1;
  double coefficient_floor = 0.0;  // see apply_coefficient_floor

  std::size_t block() const { return std::size_t{1} << (jmax + 1); }
  std::size_t width() const { return sensors * block(); }
  friend bool operator==(const CoefficientLayout&, const CoefficientLayout&) = default;
};

struct RankNode {
  int d = 0;
  std::size_t k = 0;
  int parent = -1;
  int left = -1;
  int right = -1;
  bool leaf = true;
  std::size_t rank = 0;  // leaves only
  double omega = 0.0;
  std::size_t n = 0;      // training samples in the cell
  std::size_t n_pos = 0;
  FilterIndexSet filter;              // functional inner nodes, canonical order
  std::vector<std::size_t> columns;   // input positions fed to the classifier
  CostSensitiveTree classifier;
};

class RankingTree {
 public:
  enum class Kind { Standard, Functional };

  Kind kind = Kind::Standard;
  std::size_t input_dim = 0;  // feature dimension, or coefficient row width
  std::optional<CoefficientLayout> layout;
  std::vector<double> center;  // subtracted from raw curves before transforming; empty = none
  std::vector<RankNode> nodes;

  std::size_t leaf_count() const { return leaves().size(); }

  /// Reachable leaves, left to right.
  std::vector<int> leaves() const {
    std::vector<int> out;
    if (nodes.empty()) return out;
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const auto& n = nodes[static_cast<std::size_t>(i)];
      if (n.leaf) {
        out.push_back(i);
      } else {
        stack.push_back(n.right);
        stack.push_back(n.left);
      }
    }
    return out;
  }

  std::vector<int> inner_nodes() const {
    std::vector<int> out;
    if (nodes.empty()) return out;
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const auto& n = nodes[static_cast<std::size_t>(i)];
      if (n.leaf) continue;
      out.push_back(i);
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
    return out;
  }

  void assign_ranks() {
    const auto lv = leaves();
    for (std::size_t i = 0; i < lv.size(); ++i) nodes[static_cast<std::size_t>(lv[i])].rank = lv.size() - i;
  }

  /// Leaf reached by an input row (feature vector or coefficient row).
  int leaf_of(std::span<const double> row) const {
    if (row.size() != input_dim)
      throw Error(Errc::IndexMismatch, "input of width " + std::to_string(row.size()) + ", tree expects " +
                                           std::to_string(input_dim));
    std::vector<double> feat;
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].leaf) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      feat.resize(n.columns.size());
      for (std::size_t c = 0; c < n.columns.size(); ++c) feat[c] = row[n.columns[c]];
      i = n.classifier.predict(feat) == Label::Positive ? n.left : n.right;
    }
    return i;
  }

  double score_row(std::span<const double> row) const {
    return static_cast<double>(nodes[static_cast<std::size_t>(leaf_of(row))].rank);
  }

  /// Coefficient row of a raw multi-sensor curve under this tree's layout.
  std::vector<double> transform(std::span<const double> samples) const {
    if (kind != Kind::Functional || !layout) throw Error(Errc::IndexMismatch, "standard trees take feature vectors");
    const auto& lay = *layout;
    if (samples.size() != lay.width())
      throw Error(Errc::IndexMismatch, "curve of length " + std::to_string(samples.size()) + ", tree expects " +
                                           std::to_string(lay.width()));
    std::vector<double> centered;
    if (!center.empty()) {
      if (center.size() != samples.size()) throw Error(Errc::IndexMismatch, "centering curve length mismatch");
      centered.resize(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) centered[i] = samples[i] - center[i];
      samples = centered;
    }
    const auto fam = family_taps(lay.family);
    std::vector<double> out(lay.width());
    for (std::size_t s = 0; s < lay.sensors; ++s) {
      const auto c = dwt_forward(samples.subspan(s * lay.block(), lay.block()), fam, lay.j0);
      std::copy(c.data.begin(), c.data.end(), out.begin() + static_cast<std::ptrdiff_t>(s * lay.block()));
      apply_coefficient_floor(std::span<double>(out).subspan(s * lay.block(), lay.block()), lay.coefficient_floor);
    }
    return out;
  }

  double score_curve(std::span<const double> samples) const { return score_row(transform(samples)); }
  double score_curve(const Curve& curve) const { return score_curve(curve.samples()); }

  /// Copy with node `i` turned into a leaf; its former subtree stays in the
  /// node array but becomes unreachable.
  RankingTree collapsed(int i) const {
    RankingTree t = *this;
    auto& n = t.nodes[static_cast<std::size_t>(i)];
    n.leaf = true;
    n.left = n.right = -1;
    n.filter = FilterIndexSet{};
    n.columns.clear();
    n.classifier = CostSensitiveTree{};
    t.assign_ranks();
    return t;
  }

  /// Drops unreachable nodes, preserving preorder.
  RankingTree compacted() const {
    RankingTree t = *this;
    t.nodes.clear();
    if (nodes.empty()) return t;
    std::function<int(int, int)> copy = [&](int i, int parent) {
      const int id = static_cast<int>(t.nodes.size());
      t.nodes.push_back(nodes[static_cast<std::size_t>(i)]);
      t.nodes.back().parent = parent;
      if (!nodes[static_cast<std::size_t>(i)].leaf) {
        const int l = copy(nodes[static_cast<std::size_t>(i)].left, id);
        const int r = copy(nodes[static_cast<std::size_t>(i)].right, id);
        t.nodes[static_cast<std::size_t>(id)].left = l;
        t.nodes[static_cast<std::size_t>(id)].right = r;
      }
      return id;
    };
    copy(0, -1);
    t.assign_ranks();
    return t;
  }
};

/// Curves with labels; each curve holds `sensors` consecutive dyadic blocks.
struct LabeledCurveSet {
  std::vector<std::vector<double>> curves;
  std::vector<Label> labels;
  std::size_t sensors = 1;

  std::size_t size() const { return curves.size(); }

  void validate() const {
    if (curves.size() != labels.size()) throw Error(Errc::IndexMismatch, "curve and label counts differ");
    for (const auto& c : curves)
      if (c.size() != curves.front().size()) throw Error(Errc::InvalidLength, "curves differ in length");
  }

  LabeledCurveSet subset(std::span<const std::size_t> rows) const {
    LabeledCurveSet out;
    out.sensors = sensors;
    for (std::size_t r : rows) {
      out.curves.push_back(curves.at(r));
      out.labels.push_back(labels.at(r));
    }
    return out;
  }
};

namespace detail {

struct CellFilter {
  FilterIndexSet filter;
  std::vector<std::size_t> columns;
};

inline std::vector<std::size_t> iota_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), std::size_t{0});
  return r;
}

// Preorder growth. `select(rows)` yields the classifier input columns for a
// cell, or nothing if the cell cannot be featurized.
template <class RowOf, class Select>
void grow_cells(RankingTree& tree, RowOf&& row_of, std::span<const Label> y, std::span<const std::size_t> rows,
                const GrowParams& p, Select&& select) {
  if (rows.empty()) throw Error(Errc::EmptyEnsemble, "ranking tree on an empty sample");
  if (p.depth < 0) throw Error(Errc::InvalidCount, "tree depth must be nonnegative");
  std::size_t pos = 0;
  for (std::size_t r : rows) pos += y[r] == Label::Positive;
  if (pos == 0 || pos == rows.size())
    throw Error(Errc::DegenerateSample, "ranking tree needs both classes at the root");

  std::function<int(std::vector<std::size_t>, int, std::size_t, int)> grow =
      [&](std::vector<std::size_t> cell, int d, std::size_t k, int parent) -> int {
    const int id = static_cast<int>(tree.nodes.size());
    RankNode node;
    node.d = d;
    node.k = k;
    node.parent = parent;
    node.n = cell.size();
    for (std::size_t r : cell) node.n_pos += y[r] == Label::Positive;
    node.omega = static_cast<double>(node.n_pos) / static_cast<double>(node.n);
    tree.nodes.push_back(node);

    const bool pure = node.n_pos == 0 || node.n_pos == node.n;
    if (d >= p.depth || pure || cell.size() < p.min_split) return id;
    std::optional<CellFilter> cf = select(std::span<const std::size_t>(cell));
    if (!cf || cf->columns.empty()) return id;

    FeatureMatrix x(cf->columns.size());
    std::vector<Label> local_y;
    local_y.reserve(cell.size());
    std::vector<double> buf(cf->columns.size());
    for (std::size_t r : cell) {
      const auto src = row_of(r);
      for (std::size_t c = 0; c < buf.size(); ++c) buf[c] = src[cf->columns[c]];
      x.add_row(buf);
      local_y.push_back(y[r]);
    }
    auto clf = train_leafrank(x, local_y, node.omega, p.leaf);

    std::vector<std::size_t> left, right;
    for (std::size_t i = 0; i < cell.size(); ++i)
      (clf.predict(x.row(i)) == Label::Positive ? left : right).push_back(cell[i]);
    if (left.empty() || right.empty()) return id;

    cell.clear();
    cell.shrink_to_fit();
    {
      auto& n = tree.nodes[static_cast<std::size_t>(id)];
      n.leaf = false;
      n.filter = std::move(cf->filter);
      n.columns = std::move(cf->columns);
      n.classifier = std::move(clf);
    }
    const int l = grow(std::move(left), d + 1, 2 * k, id);
    const int r = grow(std::move(right), d + 1, 2 * k + 1, id);
    tree.nodes[static_cast<std::size_t>(id)].left = l;
    tree.nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  };
  grow(std::vector<std::size_t>(rows.begin(), rows.end()), 0, 0, -1);
  tree.assign_ranks();
}

inline int pool_level(const FilterParams& f, const CoefficientTable& table) {
  if (f.j < 0) return table.jmax();
  if (f.j < table.j0() || f.j - 1 > table.jmax())
    throw Error(Errc::InvalidScale, "filter level j=" + std::to_string(f.j) + " outside [" +
                                        std::to_string(table.j0()) + ", " + std::to_string(table.jmax() + 1) + "]");
  return f.j - 1;
}

inline std::optional<CellFilter> select_filter(const CoefficientTable& table, std::span<const std::size_t> rows,
                                               const FilterParams& f, std::optional<Family> family = std::nullopt) {
  const int jpool = pool_level(f, table);
  FilterIndexSet sel;
  switch (f.mode) {
    case SelectionMode::Linear:
      sel = linear_index_set(jpool + 1, table.j0(), table.sensors());
      break;
    case SelectionMode::TopVariance:
      sel = top_variance_index_set(table, rows, f.n_coeffs, jpool);
      break;
    case SelectionMode::Threshold:
      sel = threshold_index_set(table, rows, f.threshold, jpool);
      break;
  }
  if (sel.empty()) return std::nullopt;
  CellFilter cf;
  cf.filter = sel.canonical();
  cf.filter.family = family;
  cf.columns = filter_columns(table, cf.filter);
  return cf;
}

inline RankingTree functional_shell(const CoefficientTable& table, Family family) {
  RankingTree t;
  t.kind = RankingTree::Kind::Functional;
  t.layout = CoefficientLayout{family, table.j0(), table.jmax(), table.sensors(), table.coefficient_floor()};
  t.input_dim = table.cols();
  return t;
}

}  // namespace detail

/// TreeRank on fixed feature vectors (rows of `x` listed in `rows`; repeats allowed).
inline RankingTree grow_standard(const FeatureMatrix& x, std::span<const Label> y, std::span<const std::size_t> rows,
                                 const GrowParams& p = {}) {
  if (y.size() != x.rows()) throw Error(Errc::IndexMismatch, "label count differs from feature rows");
  if (x.cols() == 0) throw Error(Errc::InvalidFeatures, "ranking tree needs at least one feature");
  RankingTree t;
  t.kind = RankingTree::Kind::Standard;
  t.input_dim = x.cols();
  const auto all = detail::iota_rows(x.cols());
  detail::grow_cells(
      t, [&](std::size_t r) { return x.row(r); }, y, rows, p,
      [&](std::span<const std::size_t>) { return std::optional<detail::CellFilter>(detail::CellFilter{{}, all}); });
  return t;
}

inline RankingTree grow_standard(const FeatureMatrix& x, std::span<const Label> y, const GrowParams& p = {}) {
  const auto rows = detail::iota_rows(x.rows());
  return grow_standard(x, y, rows, p);
}

/// Functional TreeRank: every cell selects its own filter from the
/// coefficients of the curves it contains.
inline RankingTree grow_functional(const CoefficientTable& table, Family family, std::span<const Label> y,
                                   std::span<const std::size_t> rows, const FilterParams& f,
                                   const GrowParams& p = {}) {
  if (y.size() != table.rows()) throw Error(Errc::IndexMismatch, "label count differs from coefficient rows");
  auto t = detail::functional_shell(table, family);
  detail::grow_cells(
      t, [&](std::size_t r) { return table.row(r); }, y, rows, p,
      [&](std::span<const std::size_t> cell) { return detail::select_filter(table, cell, f, family); });
  return t;
}

inline RankingTree grow_functional(const CoefficientTable& table, Family family, std::span<const Label> y,
                                   const FilterParams& f, const GrowParams& p = {}) {
  const auto rows = all_rows(table);
  return grow_functional(table, family, y, rows, f, p);
}

/// TreeRank on a single filter selected once from all training curves.
inline RankingTree grow_filtered(const CoefficientTable& table, Family family, std::span<const Label> y,
                                 std::span<const std::size_t> rows, const FilterParams& f, const GrowParams& p = {}) {
  if (y.size() != table.rows()) throw Error(Errc::IndexMismatch, "label count differs from coefficient rows");
  if (rows.empty()) throw Error(Errc::EmptyEnsemble, "ranking tree on an empty sample");
  const auto global = detail::select_filter(table, rows, f, family);
  if (!global) throw Error(Errc::InvalidFeatures, "global filter selected no coefficients");
  auto t = detail::functional_shell(table, family);
  detail::grow_cells(
      t, [&](std::size_t r) { return table.row(r); }, y, rows, p,
      [&](std::span<const std::size_t>) { return global; });
  return t;
}

inline RankingTree grow_filtered(const CoefficientTable& table, Family family, std::span<const Label> y,
                                 const FilterParams& f, const GrowParams& p = {}) {
  const auto rows = all_rows(table);
  return grow_filtered(table, family, y, rows, f, p);
}

template <class RowOf>
std::vector<double> score_rows(const RankingTree& tree, RowOf&& row_of, std::span<const std::size_t> rows) {
  std::vector<double> s;
  s.reserve(rows.size());
  for (std::size_t r : rows) s.push_back(tree.score_row(row_of(r)));
  return s;
}

inline std::vector<double> score_table(const RankingTree& tree, const CoefficientTable& table) {
  const auto rows = all_rows(table);
  return score_rows(tree, [&](std::size_t r) { return table.row(r); }, rows);
}

inline std::vector<double> score_matrix(const RankingTree& tree, const FeatureMatrix& x) {
  const auto rows = detail::iota_rows(x.rows());
  return score_rows(tree, [&](std::size_t r) { return x.row(r); }, rows);
}

// ---------------------------------------------------------------------------
// Pruning

struct PruneParams {
  std::size_t folds = 4;
  std::size_t repeats = 1;  // independent fold assignments averaged
  double tolerance = 0.0;  // accept smaller trees whose CV-AUC is within this of the best
  std::uint64_t seed = 0;
};

struct PruneReport {
  std::vector<double> cv_auc;  // index s-1: CV-AUC of the s-leaf subtree
  std::size_t full_leaves = 0;
  std::size_t chosen_leaves = 0;
};

/// Stratified fold assignment: class counts per fold differ by at most one.
inline std::vector<std::size_t> stratified_folds(std::span<const Label> y, std::span<const std::size_t> rows,
                                                 std::size_t folds, Rng& rng) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < rows.size(); ++i) (y[rows[i]] == Label::Positive ? pos : neg).push_back(i);
  shuffle(pos, rng);
  shuffle(neg, rng);
  std::vector<std::size_t> fold(rows.size());
  for (std::size_t i = 0; i < pos.size(); ++i) fold[pos[i]] = i % folds;
  // negatives continue the cycle so fold sizes also stay within one
  for (std::size_t i = 0; i < neg.size(); ++i) fold[neg[i]] = (pos.size() + i) % folds;
  return fold;
}

namespace detail {

// Leaf of `tree` (possibly with collapsed nodes) containing an input whose
// leaf in the uncollapsed tree was `full_leaf`.
inline int current_leaf(const RankingTree& tree, int full_leaf) {
  int top = full_leaf;
  for (int i = full_leaf; i >= 0; i = tree.nodes[static_cast<std::size_t>(i)].parent)
    if (tree.nodes[static_cast<std::size_t>(i)].leaf) top = i;
  return top;
}

inline double auc_of_leaves(const RankingTree& tree, std::span<const int> full_leaves, std::span<const Label> y) {
  std::vector<double> s(full_leaves.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    s[i] = static_cast<double>(tree.nodes[static_cast<std::size_t>(current_leaf(tree, full_leaves[i]))].rank);
  return empirical_auc(s, y);
}

}  // namespace detail

/// Weakest-link sequence: element s-1 has s leaves; each step collapses the
/// node (both children leaves) whose removal keeps training AUC highest.
/// Nodes stay in place; unreachable ones are dropped only by compacted().
template <class RowOf>
std::vector<RankingTree> pruning_sequence(const RankingTree& tree, RowOf&& row_of, std::span<const Label> y,
                                          std::span<const std::size_t> rows) {
  std::vector<int> full_leaf(rows.size());
  std::vector<Label> ly(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    full_leaf[i] = tree.leaf_of(row_of(rows[i]));
    ly[i] = y[rows[i]];
  }
  std::vector<RankingTree> seq{tree};
  while (seq.back().leaf_count() > 1) {
    const auto& cur = seq.back();
    std::optional<RankingTree> best;
    double best_auc = -1.0;
    for (int i : cur.inner_nodes()) {
      const auto& n = cur.nodes[static_cast<std::size_t>(i)];
      if (!cur.nodes[static_cast<std::size_t>(n.left)].leaf || !cur.nodes[static_cast<std::size_t>(n.right)].leaf)
        continue;
      auto cand = cur.collapsed(i);
      const double a = detail::auc_of_leaves(cand, full_leaf, ly);
      if (a > best_auc) {
        best_auc = a;
        best = std::move(cand);
      }
    }
    seq.push_back(std::move(*best));
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

/// Selects a subtree of `tree` by V-fold cross-validated AUC. `grow(rows)`
/// must rebuild a tree the way `tree` was built, on the given rows.
template <class RowOf, class Grow>
RankingTree prune(const RankingTree& tree, RowOf&& row_of, std::span<const Label> y,
                  std::span<const std::size_t> rows, Grow&& grow, const PruneParams& p = {},
                  PruneReport* report = nullptr) {
  if (p.folds < 2) throw Error(Errc::InvalidCount, "pruning needs at least 2 folds");
  if (p.repeats < 1) throw Error(Errc::InvalidCount, "pruning needs at least one fold assignment");
  std::size_t pos = 0;
  for (std::size_t r : rows) pos += y[r] == Label::Positive;
  if (pos < p.folds || rows.size() - pos < p.folds)
    throw Error(Errc::DegenerateSample, "too few samples of a class for " + std::to_string(p.folds) + " folds");

  const auto seq = pruning_sequence(tree, row_of, y, rows);
  const std::size_t full = seq.size();
  std::vector<double> cv(full, 0.0);

  const double runs = static_cast<double>(p.folds * p.repeats);
  for (std::size_t rep = 0; rep < p.repeats; ++rep) {
    auto rng = make_rng(p.seed, {0x7072756eULL, rep});
    const auto fold = stratified_folds(y, rows, p.folds, rng);
    for (std::size_t v = 0; v < p.folds; ++v) {
      std::vector<std::size_t> train, held;
      for (std::size_t i = 0; i < rows.size(); ++i) (fold[i] == v ? held : train).push_back(rows[i]);
      const RankingTree ft = grow(std::span<const std::size_t>(train));
      const auto fseq = pruning_sequence(ft, row_of, y, train);
      std::vector<int> full_leaf(held.size());
      std::vector<Label> hy(held.size());
      for (std::size_t i = 0; i < held.size(); ++i) {
        full_leaf[i] = ft.leaf_of(row_of(held[i]));
        hy[i] = y[held[i]];
      }
      for (std::size_t s = 1; s <= full; ++s) {
        const auto& sub = fseq[std::min(s, fseq.size()) - 1];
        cv[s - 1] += detail::auc_of_leaves(sub, full_leaf, hy) / runs;
      }
    }
  }

  const double best = *std::max_element(cv.begin(), cv.end());
  const double floor = std::max(cv.back(), best - p.tolerance) - 1e-12;
  std::size_t chosen = full;
  for (std::size_t s = 1; s <= full; ++s)
    if (cv[s - 1] >= floor) {
      chosen = s;
      break;
    }
  if (report) {
    report->cv_auc = cv;
    report->full_leaves = full;
    report->chosen_leaves = chosen;
  }
  return seq[chosen - 1].compacted();
}

}  // namespace ftr
