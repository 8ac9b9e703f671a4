#pragma once

// LeafRank: cost-sensitive classification tree used to split a ranking cell.
//
// For a cell with m samples and cost omega, a classifier labelling a region
// C_l "positive" has empirical weighted risk
//
//   (2/m) (1 - omega) #{positives outside C_l} + (2/m) omega #{negatives in C_l}.
//
// Growth is best-first under a leaf budget. Each leaf's candidate split is
// the axis-aligned midpoint split minimizing that risk, with cost-weighted
// Gini breaking ties (which also lets growth proceed through zero-risk-gain
// splits such as the first cut of an XOR layout). Leaf labels minimize the
// local weighted risk.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "ftr/error.hpp"
#include "ftr/matrix.hpp"
#include "ftr/metrics.hpp"

namespace ftr {

struct LeafRankParams {
  std::size_t max_leaves = 8;
  std::size_t min_node = 5;  // minimum samples on each side of a split
};

class CostSensitiveTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Label label = Label::Negative;

    bool is_leaf() const { return feature < 0; }
  };

  CostSensitiveTree() = default;
  CostSensitiveTree(std::size_t dimension, std::vector<Node> nodes)
      : dimension_(dimension), nodes_(std::move(nodes)) {}

  std::size_t dimension() const { return dimension_; }
  const std::vector<Node>& nodes() const { return nodes_; }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
  }

  /// Values <= threshold go left.
  Label predict(std::span<const double> x) const {
    if (x.size() != dimension_)
      throw Error(Errc::IndexMismatch, "feature vector of dimension " + std::to_string(x.size()) +
                                           ", classifier expects " + std::to_string(dimension_));
    int i = 0;
    while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
      const auto& n = nodes_[static_cast<std::size_t>(i)];
      i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(i)].label;
  }

  friend bool operator==(const CostSensitiveTree& a, const CostSensitiveTree& b) {
    if (a.dimension_ != b.dimension_ || a.nodes_.size() != b.nodes_.size()) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
      const auto& x = a.nodes_[i];
      const auto& y = b.nodes_[i];
      if (x.feature != y.feature || x.left != y.left || x.right != y.right || x.label != y.label) return false;
      if (!x.is_leaf() && x.threshold != y.threshold) return false;
    }
    return true;
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<Node> nodes_;
};

/// Empirical weighted misclassification risk of predicted labels.
inline double weighted_risk(std::span<const Label> predicted, std::span<const Label> truth, double omega) {
  if (truth.empty()) throw Error(Errc::EmptyEnsemble, "weighted risk of an empty sample");
  if (predicted.size() != truth.size()) throw Error(Errc::IndexMismatch, "prediction/label size mismatch");
  std::size_t fn = 0, fp = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == Label::Positive && predicted[i] == Label::Negative) ++fn;
    if (truth[i] == Label::Negative && predicted[i] == Label::Positive) ++fp;
  }
  const double m = static_cast<double>(truth.size());
  return 2.0 / m * (1.0 - omega) * static_cast<double>(fn) + 2.0 / m * omega * static_cast<double>(fp);
}

namespace detail {

inline constexpr double kTieEps = 1e-12;

struct LeafCost {
  double omega;

  double pos_mass(double p) const { return (1.0 - omega) * p; }
  double neg_mass(double q) const { return omega * q; }

  Label label(double p, double q) const {
    if (q == 0.0) return p > 0.0 ? Label::Positive : Label::Negative;
    if (p == 0.0) return Label::Negative;
    // predicting + costs omega*q, predicting - costs (1-omega)*p
    const double plus = neg_mass(q), minus = pos_mass(p);
    return plus < minus - kTieEps * std::max(1.0, plus + minus) ? Label::Positive : Label::Negative;
  }

  double risk(double p, double q) const {
    return label(p, q) == Label::Positive ? neg_mass(q) : pos_mass(p);
  }

  double gini(double p, double q) const {
    const double a = pos_mass(p), b = neg_mass(q);
    return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0;
  }
};

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double risk = std::numeric_limits<double>::infinity();
  double gini = std::numeric_limits<double>::infinity();
};

// Strictly better under (risk, gini) with a small tie tolerance.
inline bool better(double risk_a, double gini_a, double risk_b, double gini_b) {
  const double tr = kTieEps * std::max(1.0, std::abs(risk_a) + std::abs(risk_b));
  if (risk_a < risk_b - tr) return true;
  if (risk_a > risk_b + tr) return false;
  const double tg = kTieEps * std::max(1.0, std::abs(gini_a) + std::abs(gini_b));
  return gini_a < gini_b - tg;
}

inline std::optional<SplitCandidate> best_split(const FeatureMatrix& x, std::span<const Label> y,
                                                std::span<const std::size_t> rows, const LeafCost& cost,
                                                std::size_t min_node) {
  const std::size_t m = rows.size();
  if (m < 2 * std::max<std::size_t>(min_node, 1)) return std::nullopt;
  double p_total = 0.0, q_total = 0.0;
  for (std::size_t r : rows) (y[r] == Label::Positive ? p_total : q_total) += 1.0;

  std::optional<SplitCandidate> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
    double p_left = 0.0, q_left = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      (y[order[i]] == Label::Positive ? p_left : q_left) += 1.0;
      const double lo = x(order[i], f), hi = x(order[i + 1], f);
      if (!(lo < hi)) continue;
      if (i + 1 < min_node || m - i - 1 < min_node) continue;
      const double p_right = p_total - p_left, q_right = q_total - q_left;
      const double risk = cost.risk(p_left, q_left) + cost.risk(p_right, q_right);
      const double gini = cost.gini(p_left, q_left) + cost.gini(p_right, q_right);
      if (!best || better(risk, gini, best->risk, best->gini)) {
        double thr = lo + (hi - lo) * 0.5;
        if (!(thr < hi)) thr = lo;
        best = SplitCandidate{static_cast<int>(f), thr, risk, gini};
      }
    }
  }
  return best;
}

}  // namespace detail

/// Trains on the given rows of `x`. Rows need not contain both classes; a
/// single-class cell yields one leaf predicting the class present.
inline CostSensitiveTree train_leafrank(const FeatureMatrix& x, std::span<const Label> y,
                                        std::span<const std::size_t> rows, double omega,
                                        const LeafRankParams& params = {}) {
  if (rows.empty()) throw Error(Errc::EmptyEnsemble, "LeafRank training on an empty cell");
  if (x.cols() == 0) throw Error(Errc::InvalidFeatures, "LeafRank needs at least one feature");
  if (params.max_leaves < 1) throw Error(Errc::InvalidCount, "max_leaves must be positive");
  if (!(omega >= 0.0 && omega <= 1.0)) throw Error(Errc::DataError, "cost omega outside [0, 1]");
  if (y.size() != x.rows()) throw Error(Errc::IndexMismatch, "label count differs from feature rows");

  const detail::LeafCost cost{omega};
  using Node = CostSensitiveTree::Node;

  struct Work {
    std::vector<std::size_t> rows;
    double p = 0.0, q = 0.0;
    std::optional<detail::SplitCandidate> split;
  };

  std::vector<Node> nodes;
  std::vector<Work> work;
  auto make_leaf = [&](std::vector<std::size_t> leaf_rows) {
    Work w;
    w.rows = std::move(leaf_rows);
    for (std::size_t r : w.rows) (y[r] == Label::Positive ? w.p : w.q) += 1.0;
    if (w.p > 0.0 && w.q > 0.0) w.split = detail::best_split(x, y, w.rows, cost, params.min_node);
    Node n;
    n.label = cost.label(w.p, w.q);
    nodes.push_back(n);
    work.push_back(std::move(w));
    return static_cast<int>(nodes.size() - 1);
  };

  make_leaf(std::vector<std::size_t>(rows.begin(), rows.end()));
  std::size_t leaves = 1;
  while (leaves < params.max_leaves) {
    int pick = -1;
    double pick_risk_gain = 0.0, pick_gini_gain = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].is_leaf() || !work[i].split) continue;
      const auto& w = work[i];
      const double risk_gain = cost.risk(w.p, w.q) - w.split->risk;
      const double gini_gain = cost.gini(w.p, w.q) - w.split->gini;
      // larger gain first; ties keep the earlier node
      if (pick < 0 || detail::better(-risk_gain, -gini_gain, -pick_risk_gain, -pick_gini_gain)) {
        pick = static_cast<int>(i);
        pick_risk_gain = risk_gain;
        pick_gini_gain = gini_gain;
      }
    }
    if (pick < 0) break;

    const auto split = *work[static_cast<std::size_t>(pick)].split;
    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : work[static_cast<std::size_t>(pick)].rows)
      (x(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left_rows : right_rows).push_back(r);
    work[static_cast<std::size_t>(pick)].rows.clear();
    work[static_cast<std::size_t>(pick)].split.reset();

    const int l = make_leaf(std::move(left_rows));
    const int r = make_leaf(std::move(right_rows));
    auto& parent = nodes[static_cast<std::size_t>(pick)];
    parent.feature = split.feature;
    parent.threshold = split.threshold;
    parent.left = l;
    parent.right = r;
    ++leaves;
  }
  return CostSensitiveTree(x.cols(), std::move(nodes));
}

inline CostSensitiveTree train_leafrank(const FeatureMatrix& x, std::span<const Label> y, double omega,
                                        const LeafRankParams& params = {}) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return train_leafrank(x, y, rows, omega, params);
}

/// Weighted risk of a trained tree on the given rows.
inline double tree_risk(const CostSensitiveTree& tree, const FeatureMatrix& x, std::span<const Label> y,
                        std::span<const std::size_t> rows, double omega) {
  std::vector<Label> pred, truth;
  for (std::size_t r : rows) {
    pred.push_back(tree.predict(x.row(r)));
    truth.push_back(y[r]);
  }
  return weighted_risk(pred, truth, omega);
}

inline double tree_risk(const CostSensitiveTree& tree, const FeatureMatrix& x, std::span<const Label> y,
                        double omega) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return tree_risk(tree, x, y, rows, omega);
}

}  // namespace ftr
