#pragma once

// Orthonormal periodic discrete wavelet transform of dyadic-length curves.
//
// Coefficients are stored in pyramid order: the 2^j0 scaling coefficients
// first, then detail levels j0, j0+1, ..., jmax, each by ascending position.
// Detail (j, k) therefore lives at flat offset 2^j + k, and the scaling
// coefficients are addressed as level j0 - 1 so that every retained
// coefficient is a (j, k) pair with j >= j0 - 1.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ftr/error.hpp"

namespace ftr {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline int log2_exact(std::size_t n) {
  int l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// A uniformly sampled signal of length 2^L, L >= 1, with finite samples.
class Curve {
 public:
  Curve() = default;
  explicit Curve(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2 || !is_power_of_two(samples_.size()))
      throw Error(Errc::InvalidLength,
                  "curve length " + std::to_string(samples_.size()) + " is not a power of two >= 2");
    for (double v : samples_)
      if (!std::isfinite(v)) throw Error(Errc::DataError, "curve contains a non-finite sample");
  }

  std::span<const double> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  int levels() const { return log2_exact(samples_.size()); }
  double operator[](std::size_t i) const { return samples_[i]; }

  double energy() const {
    double e = 0.0;
    for (double v : samples_) e += v * v;
    return e;
  }

 private:
  std::vector<double> samples_;
};

enum class Family { Haar, Daubechies4, Daubechies12, Daubechies20, Coiflet2, Symmlet10, Beylkin };

inline constexpr std::array<Family, 7> kAllFamilies = {
    Family::Haar,     Family::Daubechies4, Family::Daubechies12, Family::Daubechies20,
    Family::Coiflet2, Family::Symmlet10,   Family::Beylkin};

inline std::string to_string(Family f) {
  switch (f) {
    case Family::Haar: return "Haar";
    case Family::Daubechies4: return "Daubechies4";
    case Family::Daubechies12: return "Daubechies12";
    case Family::Daubechies20: return "Daubechies20";
    case Family::Coiflet2: return "Coiflet2";
    case Family::Symmlet10: return "Symmlet10";
    case Family::Beylkin: return "Beylkin";
  }
  return "Unknown";
}

/// Case-insensitive.
inline Family family_from_string(std::string_view name) {
  const auto lower = [](std::string_view v) {
    std::string out(v);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  for (Family f : kAllFamilies)
    if (lower(to_string(f)) == lower(name)) return f;
  throw Error(Errc::UnknownFamily, "unknown wavelet family '" + std::string(name) + "'");
}

struct WaveletFamily {
  Family name = Family::Haar;
  std::vector<double> lowpass;
  int vanishing_moments = 1;

  /// Quadrature mirror of the lowpass taps: g[m] = (-1)^m h[L-1-m].
  std::vector<double> highpass() const {
    const std::size_t n = lowpass.size();
    std::vector<double> g(n);
    for (std::size_t m = 0; m < n; ++m) g[m] = (m % 2 == 0 ? 1.0 : -1.0) * lowpass[n - 1 - m];
    return g;
  }
};

/// Taps of the registered compactly supported orthonormal families.
///
/// Daubechies N / Coiflet / Symmlet follow the usual "N taps" (Daubechies)
/// and "order" (Coiflet, Symmlet) naming: Daubechies4 has 4 taps and 2
/// vanishing moments, Daubechies12 6, Daubechies20 10; Coiflet2 has 12 taps
/// and 4 vanishing moments; Symmlet10 has 20 taps and 10. Beylkin is the
/// 18-tap filter as published with 12 significant digits; it has 3 vanishing
/// moments and is orthonormal to about 5e-13.
inline WaveletFamily family_taps(Family name) {
  WaveletFamily w;
  w.name = name;
  switch (name) {
    case Family::Haar:
      w.lowpass = {1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2};
      w.vanishing_moments = 1;
      break;
    case Family::Daubechies4:
      w.lowpass = {0.48296291314453416, 0.8365163037378079, 0.2241438680420134,
                   -0.12940952255126037};
      w.vanishing_moments = 2;
      break;
    case Family::Daubechies12:
      w.lowpass = {0.11154074335010947,   0.49462389039845306,  0.7511339080210954,
                   0.31525035170919763,   -0.22626469396543983, -0.12976686756726194,
                   0.09750160558732304,   0.027522865530305727, -0.03158203931748603,
                   0.0005538422011614961, 0.004777257510945511, -0.0010773010853084796};
      w.vanishing_moments = 6;
      break;
    case Family::Daubechies20:
      w.lowpass = {0.026670057900555554,   0.1881768000776915,     0.5272011889317256,
                   0.6884590394536035,     0.2811723436605775,     -0.24984642432731538,
                   -0.19594627437737705,   0.12736934033579325,    0.09305736460357235,
                   -0.07139414716639708,   -0.029457536821875813,  0.033212674059341,
                   0.0036065535669561697,  -0.010733175483330575,  0.001395351747052901,
                   0.001992405295185056,   -0.0006858566949597116, -0.00011646685512928545,
                   9.358867032006959e-05,  -1.3264202894521244e-05};
      w.vanishing_moments = 10;
      break;
    case Family::Coiflet2:
      w.lowpass = {0.01638733646320364,  -0.04146493678687178,   -0.0673725547237256,
                   0.3861100668227629,   0.8127236354494135,     0.4170051844232391,
                   -0.07648859907828076, -0.05943441864643109,   0.02368017194684777,
                   0.005611434819368834, -0.0018232088709110323, -0.000720549445520347};
      w.vanishing_moments = 4;
      break;
    case Family::Symmlet10:
      w.lowpass = {-0.0004593294210046588, 5.7036083618494284e-05, 0.004593173585311828,
                   -0.0008043589320165449, -0.02035493981231129,   0.005764912033581909,
                   0.04999497207737669,    -0.0319900568824278,    -0.03553674047381755,
                   0.38382676106708546,    0.7695100370211071,     0.47169066693843925,
                   -0.07088053578324385,   -0.15949427888491757,   0.011609893903711381,
                   0.0459272392310922,     -0.0014653825813050513, -0.008641299277022422,
                   9.563267072289475e-05,  0.0007701598091144901};
      w.vanishing_moments = 10;
      break;
    case Family::Beylkin:
      w.lowpass = {.099305765374,  .424215360813,  .699825214057,  .449718251149,
                   -.110927598348, -.264497231446, .026900308804,  .155538731877,
                   -.017520746267, -.088543630623, .019679866044,  .042916387274,
                   -.017460408696, -.014365807969, .010040411845,  .001484234782,
                   -.002736031626, .000640485329};
      w.vanishing_moments = 3;
      break;
  }
  return w;
}

inline WaveletFamily family_taps(std::string_view name) { return family_taps(family_from_string(name)); }

/// Wavelet and scaling coefficients of one curve, in pyramid order.
struct CoefficientSet {
  int j0 = 0;
  int jmax = 0;
  std::vector<double> data;

  std::size_t size() const { return data.size(); }

  bool contains(int j, std::size_t k) const {
    if (j == j0 - 1) return k < (std::size_t{1} << j0);
    return j >= j0 && j <= jmax && k < (std::size_t{1} << j);
  }

  /// Flat offset of (j, k); j = j0 - 1 addresses the scaling coefficients.
  std::size_t offset(int j, std::size_t k) const {
    if (!contains(j, k))
      throw Error(Errc::IndexMismatch, "coefficient (" + std::to_string(j) + "," + std::to_string(k) +
                                           ") outside [j0-1, jmax]");
    return j == j0 - 1 ? k : (std::size_t{1} << j) + k;
  }

  double alpha(std::size_t k) const { return data[offset(j0 - 1, k)]; }
  double beta(int j, std::size_t k) const { return data[offset(j, k)]; }
  double& at(int j, std::size_t k) { return data[offset(j, k)]; }

  double energy() const {
    double e = 0.0;
    for (double v : data) e += v * v;
    return e;
  }

  static CoefficientSet zeros(int j0, int jmax) {
    CoefficientSet c;
    c.j0 = j0;
    c.jmax = jmax;
    c.data.assign(std::size_t{1} << (jmax + 1), 0.0);
    return c;
  }
};

namespace detail {

// One analysis step on x (length m, even) with periodic wrap.
inline void analysis_step(std::span<const double> x, std::span<const double> h,
                          std::span<const double> g, std::span<double> approx,
                          std::span<double> detail) {
  const std::size_t m = x.size();
  const std::size_t half = m / 2;
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    for (std::size_t t = 0; t < h.size(); ++t) {
      const double v = x[(2 * k + t) % m];
      a += h[t] * v;
      d += g[t] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

inline void synthesis_step(std::span<const double> approx, std::span<const double> detail,
                           std::span<const double> h, std::span<const double> g,
                           std::span<double> out) {
  const std::size_t m = out.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < approx.size(); ++k)
    for (std::size_t t = 0; t < h.size(); ++t)
      out[(2 * k + t) % m] += h[t] * approx[k] + g[t] * detail[k];
}

}  // namespace detail

/// Forward pyramid down to scaling level j0 (0 <= j0 <= L-1, jmax = L-1).
inline CoefficientSet dwt_forward(std::span<const double> samples, const WaveletFamily& family, int j0) {
  const std::size_t n = samples.size();
  if (n < 2 || !is_power_of_two(n))
    throw Error(Errc::InvalidLength, "signal length " + std::to_string(n) + " is not a power of two >= 2");
  const int levels = log2_exact(n);
  if (j0 < 0 || j0 > levels - 1)
    throw Error(Errc::InvalidScale,
                "j0=" + std::to_string(j0) + " outside [0, " + std::to_string(levels - 1) + "]");

  const auto h = std::span<const double>(family.lowpass);
  const auto gv = family.highpass();
  const auto g = std::span<const double>(gv);

  CoefficientSet out;
  out.j0 = j0;
  out.jmax = levels - 1;
  out.data.assign(n, 0.0);

  std::vector<double> current(samples.begin(), samples.end());
  std::vector<double> approx(n / 2);
  for (int j = levels - 1; j >= j0; --j) {
    const std::size_t half = std::size_t{1} << j;
    detail::analysis_step(current, h, g, std::span(approx).first(half),
                          std::span(out.data).subspan(half, half));
    current.assign(approx.begin(), approx.begin() + static_cast<std::ptrdiff_t>(half));
  }
  std::copy(current.begin(), current.end(), out.data.begin());
  return out;
}

inline CoefficientSet dwt_forward(const Curve& curve, const WaveletFamily& family, int j0) {
  return dwt_forward(curve.samples(), family, j0);
}

/// Inverse pyramid; exact inverse of dwt_forward for the same family.
inline Curve dwt_inverse(const CoefficientSet& coeffs, const WaveletFamily& family) {
  if (coeffs.j0 < 0 || coeffs.jmax < coeffs.j0 ||
      coeffs.data.size() != (std::size_t{1} << (coeffs.jmax + 1)))
    throw Error(Errc::InvalidCoefficients,
                "coefficient set with j0=" + std::to_string(coeffs.j0) + ", jmax=" +
                    std::to_string(coeffs.jmax) + " holds " + std::to_string(coeffs.data.size()) +
                    " values");
  const auto h = std::span<const double>(family.lowpass);
  const auto gv = family.highpass();
  const auto g = std::span<const double>(gv);

  const std::size_t n = coeffs.data.size();
  std::vector<double> current(coeffs.data.begin(),
                              coeffs.data.begin() + (std::ptrdiff_t{1} << coeffs.j0));
  std::vector<double> next(n);
  for (int j = coeffs.j0; j <= coeffs.jmax; ++j) {
    const std::size_t half = std::size_t{1} << j;
    detail::synthesis_step(current, std::span(coeffs.data).subspan(half, half), h, g,
                           std::span(next).first(2 * half));
    current.assign(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(2 * half));
  }
  return Curve(std::move(current));
}

}  // namespace ftr
