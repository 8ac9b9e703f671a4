#pragma once

// Mixture-of-atoms curve generator with a closed-form optimal ROC.
//
// Component k (1-based) draws its curve from wavelet atoms on an index set
// E_k; the E_k are pairwise disjoint, so the component is identifiable from
// the curve and the likelihood ratio is constant on each component. Sorting
// components by decreasing omega+_k / omega-_k makes s*(x) = K - k + 1 an
// optimal scorer whose ROC joins the knots (sum omega-, sum omega+).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <tuple>
#include <vector>

#include "ftr/error.hpp"
#include "ftr/metrics.hpp"
#include "ftr/random.hpp"
#include "ftr/wavelet.hpp"

namespace ftr {

struct Atom {
  int j = 0;
  std::size_t l = 0;
  double sd = 1.0;  // amplitude ~ N(0, sd^2)

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct MixtureSpec {
  std::vector<double> omega_plus;
  std::vector<double> omega_minus;
  std::vector<std::vector<Atom>> atoms;  // atoms[k-1] is E_k
  Family family = Family::Beylkin;
  std::size_t length = 2048;
  int j0 = 1;
  double p = 0.5;  // P(Y = +1)
  double noise_sd = 0.0;

  std::size_t components() const { return omega_plus.size(); }
  int jmax() const { return log2_exact(length) - 1; }

  void validate() const {
    const std::size_t k = components();
    if (k < 1 || omega_minus.size() != k || atoms.size() != k)
      throw Error(Errc::ConfigError, "mixture weights and atom sets differ in size");
    if (!is_power_of_two(length) || length < 2) throw Error(Errc::InvalidLength, "mixture curve length not dyadic");
    if (j0 < 0 || j0 > jmax()) throw Error(Errc::InvalidScale, "mixture j0 out of range");
    if (!(p > 0.0 && p < 1.0)) throw Error(Errc::ConfigError, "class rate p must lie in (0, 1)");
    double sp = 0.0, sm = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (omega_plus[i] < 0.0 || omega_minus[i] < 0.0) throw Error(Errc::ConfigError, "negative mixture weight");
      sp += omega_plus[i];
      sm += omega_minus[i];
    }
    if (std::abs(sp - 1.0) > 1e-12 || std::abs(sm - 1.0) > 1e-12)
      throw Error(Errc::ConfigError, "mixture weights do not sum to one");
    // omega+_i / omega-_i >= omega+_{i+1} / omega-_{i+1}, cross-multiplied
    for (std::size_t i = 0; i + 1 < k; ++i)
      if (omega_plus[i] * omega_minus[i + 1] < omega_plus[i + 1] * omega_minus[i] * (1.0 - 1e-12))
        throw Error(Errc::ConfigError, "likelihood ratios not sorted at component " + std::to_string(i + 1));
    std::vector<char> used(std::size_t{1} << (jmax() + 1), 0);
    for (const auto& set : atoms) {
      if (set.empty()) throw Error(Errc::ConfigError, "mixture component without atoms");
      for (const auto& a : set) {
        if (a.j < j0 || a.j > jmax() || a.l >= (std::size_t{1} << a.j))
          throw Error(Errc::IndexMismatch, "atom outside the detail pyramid");
        auto& u = used[(std::size_t{1} << a.j) + a.l];
        if (u) throw Error(Errc::ConfigError, "atom sets overlap");
        u = 1;
      }
    }
  }
};

/// Marked Poisson atom placement and weight sampling.
struct SynthParams {
  std::size_t components = 50;
  double target_auc = 0.94;
  std::uint64_t seed = 1;
  double atoms_per_scale = 2.0;  // Poisson mean per component and detail level
  double amplitude_sd = 1.0;
  double amplitude_decay = 0.0;  // variance factor 2^(-decay j)
  int atom_jmin = -1;            // -1: j0
  int atom_jmax = -1;            // -1: finest level
  double dirichlet = 0.5;
  Family family = Family::Beylkin;
  std::size_t length = 2048;
  int j0 = 1;
  double p = 0.5;
  double noise_sd = 0.0;  // white observation noise added to every sample
};

inline double optimal_auc(std::span<const double> wp, std::span<const double> wm) {
  double area = 0.0, neg_after = 0.0;
  for (std::size_t k = wp.size(); k-- > 0;) {
    area += wp[k] * (neg_after + 0.5 * wm[k]);
    neg_after += wm[k];
  }
  return area;
}

inline double optimal_auc(const MixtureSpec& s) { return optimal_auc(s.omega_plus, s.omega_minus); }

inline RocCurve optimal_roc(const MixtureSpec& s) {
  RocCurve c;
  c.points.push_back({0.0, 0.0});
  double fp = 0.0, tp = 0.0;
  for (std::size_t k = 0; k < s.components(); ++k) {
    fp += s.omega_minus[k];
    tp += s.omega_plus[k];
    c.points.push_back({std::min(fp, 1.0), std::min(tp, 1.0)});
  }
  c.points.back() = {1.0, 1.0};
  return c;
}

namespace detail {

inline std::vector<double> dirichlet(Rng& rng, std::size_t k, double alpha) {
  std::vector<double> w(k);
  double sum = 0.0;
  for (auto& v : w) {
    do v = gamma(rng, alpha);
    while (v <= 0.0);
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

// omega+ proportional to omega- * r^gamma.
inline std::vector<double> tilt(std::span<const double> wm, std::span<const double> log_r, double g) {
  std::vector<double> lw(wm.size());
  double mx = -INFINITY;
  for (std::size_t k = 0; k < wm.size(); ++k) {
    lw[k] = std::log(wm[k]) + g * log_r[k];
    mx = std::max(mx, lw[k]);
  }
  double sum = 0.0;
  for (auto& v : lw) sum += (v = std::exp(v - mx));
  for (auto& v : lw) v /= sum;
  return lw;
}

inline void normalize(std::vector<double>& w) {
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= s;
  // fold the last rounding residue into the largest weight
  const double r = 1.0 - std::accumulate(w.begin(), w.end(), 0.0);
  *std::max_element(w.begin(), w.end()) += r;
}

}  // namespace detail

/// Samples weights and atom sets; the contrast exponent is bisected so that
/// optimal_auc lands within 1e-9 of the target.
inline MixtureSpec build_spec(const SynthParams& sp) {
  if (sp.components < 2) throw Error(Errc::ConfigError, "mixture needs at least 2 components");
  if (!(sp.target_auc > 0.5 && sp.target_auc < 1.0))
    throw Error(Errc::CalibrationFailed, "target AUC must lie in (0.5, 1)");
  MixtureSpec s;
  s.family = sp.family;
  s.length = sp.length;
  s.j0 = sp.j0;
  s.p = sp.p;
  s.noise_sd = sp.noise_sd;
  if (!(sp.noise_sd >= 0.0)) throw Error(Errc::ConfigError, "noise level must be nonnegative");
  if (!is_power_of_two(s.length) || s.length < 4) throw Error(Errc::InvalidLength, "curve length not dyadic");
  if (s.j0 < 0 || s.j0 > s.jmax()) throw Error(Errc::InvalidScale, "j0 out of range");
  const std::size_t k = sp.components;

  // weights
  auto wrng = make_rng(sp.seed, {1});
  const auto a = detail::dirichlet(wrng, k, sp.dirichlet);
  const auto b = detail::dirichlet(wrng, k, sp.dirichlet);
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x] * b[y] > a[y] * b[x]; });
  std::vector<double> wm(k), log_r(k);
  for (std::size_t i = 0; i < k; ++i) {
    wm[i] = b[order[i]];
    log_r[i] = std::log(a[order[i]]) - std::log(b[order[i]]);
  }
  auto auc_at = [&](double g) { return optimal_auc(detail::tilt(wm, log_r, g), wm); };
  double lo = 0.0, hi = 1.0;
  while (auc_at(hi) < sp.target_auc) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error(Errc::CalibrationFailed, "target AUC not reachable with these weights");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (auc_at(mid) < sp.target_auc ? lo : hi) = mid;
    if (std::abs(auc_at(hi) - sp.target_auc) < 1e-9) break;
  }
  s.omega_plus = detail::tilt(wm, log_r, hi);
  s.omega_minus = wm;
  detail::normalize(s.omega_plus);
  detail::normalize(s.omega_minus);
  if (std::abs(optimal_auc(s) - sp.target_auc) > 0.005)
    throw Error(Errc::CalibrationFailed, "contrast calibration missed the target AUC");

  // atoms: per scale, components in random order draw Poisson counts of
  // unused positions
  auto arng = make_rng(sp.seed, {2});
  const int jlo = sp.atom_jmin < 0 ? s.j0 : sp.atom_jmin;
  const int jhi = sp.atom_jmax < 0 ? s.jmax() : sp.atom_jmax;
  if (jlo < s.j0 || jhi > s.jmax() || jlo > jhi) throw Error(Errc::InvalidScale, "atom scale range out of range");
  s.atoms.assign(k, {});
  std::vector<std::vector<std::size_t>> free_pos(static_cast<std::size_t>(jhi + 1));
  for (int j = jlo; j <= jhi; ++j) {
    auto& fp = free_pos[static_cast<std::size_t>(j)];
    fp.resize(std::size_t{1} << j);
    std::iota(fp.begin(), fp.end(), std::size_t{0});
    shuffle(fp, arng);
  }
  auto atom_sd = [&](int j) { return sp.amplitude_sd * std::pow(2.0, -0.5 * sp.amplitude_decay * j); };
  for (int j = jlo; j <= jhi; ++j) {
    std::vector<std::size_t> comp(k);
    std::iota(comp.begin(), comp.end(), std::size_t{0});
    shuffle(comp, arng);
    auto& fp = free_pos[static_cast<std::size_t>(j)];
    for (std::size_t c : comp) {
      const int cnt = poisson(arng, sp.atoms_per_scale);
      for (int t = 0; t < cnt && !fp.empty(); ++t) {
        s.atoms[c].push_back({j, fp.back(), atom_sd(j)});
        fp.pop_back();
      }
    }
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (!s.atoms[c].empty()) continue;
    int j = jhi;
    while (j >= jlo && free_pos[static_cast<std::size_t>(j)].empty()) --j;
    if (j < jlo) throw Error(Errc::CalibrationFailed, "not enough wavelet positions for every component");
    s.atoms[c].push_back({j, free_pos[static_cast<std::size_t>(j)].back(), atom_sd(j)});
    free_pos[static_cast<std::size_t>(j)].pop_back();
  }
  for (auto& set : s.atoms)
    std::sort(set.begin(), set.end(), [](const Atom& x, const Atom& y) { return std::tie(x.j, x.l) < std::tie(y.j, y.l); });
  s.validate();
  return s;
}

struct OracleSample {
  std::vector<double> curve;
  Label label = Label::Negative;
  std::size_t component = 1;  // 1-based
  double oracle_score = 0.0;
};

/// Curve from component k (1-based) with fresh amplitudes.
inline std::vector<double> sample_component_curve(const MixtureSpec& s, std::size_t k, Rng& rng) {
  if (k < 1 || k > s.components()) throw Error(Errc::IndexMismatch, "component out of range");
  auto c = CoefficientSet::zeros(s.j0, s.jmax());
  for (const auto& a : s.atoms[k - 1]) c.at(a.j, a.l) = normal(rng, 0.0, a.sd);
  auto curve = dwt_inverse(c, family_taps(s.family));
  std::vector<double> out(curve.samples().begin(), curve.samples().end());
  if (s.noise_sd > 0.0)
    for (auto& v : out) v += normal(rng, 0.0, s.noise_sd);
  return out;
}

inline std::size_t draw_component(std::span<const double> w, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k];
    if (u < acc && w[k] > 0.0) return k + 1;
  }
  for (std::size_t k = w.size(); k-- > 0;)
    if (w[k] > 0.0) return k + 1;
  return w.size();
}

inline OracleSample sample_one(const MixtureSpec& s, Rng& rng) {
  OracleSample o;
  o.label = bernoulli(rng, s.p) ? Label::Positive : Label::Negative;
  o.component = draw_component(o.label == Label::Positive ? s.omega_plus : s.omega_minus, rng);
  o.oracle_score = static_cast<double>(s.components() - o.component + 1);
  o.curve = sample_component_curve(s, o.component, rng);
  return o;
}

/// n samples; sample i uses its own stream derived from (seed, i).
inline std::vector<OracleSample> sample(const MixtureSpec& s, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::InvalidCount, "sample size must be positive");
  std::vector<OracleSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = make_rng(seed, {3, i});
    out.push_back(sample_one(s, rng));
  }
  return out;
}

}  // namespace ftr
