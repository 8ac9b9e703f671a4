#pragma once

// ROC curves and empirical AUC with ties counted one half.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ftr/error.hpp"

namespace ftr {

enum class Label : std::int8_t { Negative = -1, Positive = 1 };

inline Label label_from_int(long v) {
  if (v == 1) return Label::Positive;
  if (v == -1 || v == 0) return Label::Negative;
  throw Error(Errc::ParseError, "label " + std::to_string(v) + " is not one of -1, 0, +1");
}

inline int to_int(Label l) { return static_cast<int>(l); }

struct ScoredSample {
  double score = 0.0;
  Label label = Label::Negative;
};

/// Pair counts behind the empirical AUC. `twice_concordant` is
/// 2 * #{s_neg < s_pos} + #{s_neg == s_pos}, so AUC = twice_concordant / (2 n+ n-)
/// is formed from integers in exactly one rounding step.
struct AucCounts {
  std::uint64_t twice_concordant = 0;
  std::uint64_t n_pos = 0;
  std::uint64_t n_neg = 0;

  double auc() const {
    return static_cast<double>(twice_concordant) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  }
};

inline AucCounts auc_counts(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw Error(Errc::IndexMismatch, "scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  AucCounts c;
  std::uint64_t neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t end = i;
    std::uint64_t grp_pos = 0, grp_neg = 0;
    while (end < order.size() && scores[order[end]] == scores[order[i]]) {
      if (labels[order[end]] == Label::Positive) ++grp_pos;
      else ++grp_neg;
      ++end;
    }
    c.twice_concordant += grp_pos * (2 * neg_below + grp_neg);
    neg_below += grp_neg;
    c.n_pos += grp_pos;
    c.n_neg += grp_neg;
    i = end;
  }
  return c;
}

inline void require_finite(std::span<const double> scores) {
  for (double s : scores)
    if (!std::isfinite(s)) throw Error(Errc::DataError, "non-finite score");
}

inline double empirical_auc(std::span<const double> scores, std::span<const Label> labels) {
  require_finite(scores);
  const auto c = auc_counts(scores, labels);
  if (c.n_pos == 0 || c.n_neg == 0)
    throw Error(Errc::DegenerateSample, "AUC needs at least one positive and one negative sample");
  return c.auc();
}

inline double empirical_auc(std::span<const ScoredSample> samples) {
  std::vector<double> s;
  std::vector<Label> l;
  s.reserve(samples.size());
  l.reserve(samples.size());
  for (const auto& x : samples) {
    s.push_back(x.score);
    l.push_back(x.label);
  }
  return empirical_auc(s, l);
}

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

struct RocCurve {
  std::vector<RocPoint> points;
};

inline double trapezoid_area(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

/// Step ROC curve; one vertex per distinct score, walking thresholds from
/// the highest score down. Tied scores across classes give a diagonal segment.
inline RocCurve roc_curve(std::span<const double> scores, std::span<const Label> labels) {
  require_finite(scores);
  if (scores.size() != labels.size()) throw Error(Errc::IndexMismatch, "scores and labels differ in length");
  std::size_t n_pos = 0, n_neg = 0;
  for (Label l : labels) (l == Label::Positive ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0)
    throw Error(Errc::DegenerateSample, "ROC curve needs at least one positive and one negative sample");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t end = i;
    while (end < order.size() && scores[order[end]] == scores[order[i]]) {
      if (labels[order[end]] == Label::Positive) ++tp;
      else ++fp;
      ++end;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                            static_cast<double>(tp) / static_cast<double>(n_pos)});
    i = end;
  }
  return curve;
}

inline RocCurve roc_curve(std::span<const ScoredSample> samples) {
  std::vector<double> s;
  std::vector<Label> l;
  for (const auto& x : samples) {
    s.push_back(x.score);
    l.push_back(x.label);
  }
  return roc_curve(s, l);
}

/// TPR at a given FPR on the polyline. On a vertical run (several vertices at
/// the same FPR) the topmost vertex is used.
inline double tpr_at(const RocCurve& curve, double fpr) {
  const auto& p = curve.points;
  if (p.empty()) return 0.0;
  if (fpr <= p.front().fpr) {
    double best = p.front().tpr;
    for (const auto& q : p)
      if (q.fpr == p.front().fpr) best = std::max(best, q.tpr);
    return best;
  }
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i].fpr == fpr) return p[i].tpr;
    if (p[i].fpr < fpr) {
      if (i + 1 >= p.size()) return p[i].tpr;
      const auto& a = p[i];
      const auto& b = p[i + 1];
      const double t = (fpr - a.fpr) / (b.fpr - a.fpr);
      return a.tpr + t * (b.tpr - a.tpr);
    }
  }
  return p.back().tpr;
}

struct RocEnvelope {
  RocCurve lower;
  RocCurve upper;
  RocCurve mean;
};

/// Pointwise min / max / mean TPR of several curves on a uniform FPR grid
/// with `grid` points in [0, 1].
inline RocEnvelope roc_envelope(std::span<const RocCurve> curves, std::size_t grid) {
  if (curves.empty()) throw Error(Errc::EmptyEnsemble, "ROC envelope of no curves");
  if (grid < 2) throw Error(Errc::InvalidCount, "ROC envelope grid needs at least 2 points");
  RocEnvelope env;
  for (std::size_t g = 0; g < grid; ++g) {
    const double x = static_cast<double>(g) / static_cast<double>(grid - 1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (const auto& c : curves) {
      const double y = tpr_at(c, x);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
      sum += y;
    }
    env.lower.points.push_back({x, lo});
    env.upper.points.push_back({x, hi});
    env.mean.points.push_back({x, sum / static_cast<double>(curves.size())});
  }
  return env;
}

}  // namespace ftr
