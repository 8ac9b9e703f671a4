#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ftr/random.hpp"
#include "ftr/wavelet.hpp"

namespace {

using namespace ftr;

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = normal(rng, 0.0, 1.0);
  return x;
}

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

TEST(Wavelet, HaarHandComputedPyramid) {
  const std::vector<double> x{1, 2, 3, 4};
  const auto c = dwt_forward(x, family_taps(Family::Haar), 0);
  const double r = std::numbers::sqrt2 / 2;
  ASSERT_EQ(c.data.size(), 4u);
  EXPECT_NEAR(c.alpha(0), 5.0, 1e-14);
  EXPECT_NEAR(c.beta(0, 0), -2.0, 1e-14);
  EXPECT_NEAR(c.beta(1, 0), -r, 1e-14);
  EXPECT_NEAR(c.beta(1, 1), -r, 1e-14);
}

TEST(Wavelet, HaarCoarsestScalingIsScaledMean) {
  // alpha_{0,0} = sum(x) / sqrt(n) for Haar at j0 = 0
  const auto x = random_signal(64, 3);
  double s = 0.0;
  for (double v : x) s += v;
  const auto c = dwt_forward(x, family_taps(Family::Haar), 0);
  EXPECT_NEAR(c.alpha(0), s / 8.0, 1e-12);
}

TEST(Wavelet, Daubechies4MatchesClosedFormTaps) {
  const double s3 = std::sqrt(3.0), d = 4.0 * std::numbers::sqrt2;
  const std::vector<double> expect{(1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d};
  const auto w = family_taps(Family::Daubechies4);
  ASSERT_EQ(w.lowpass.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w.lowpass[i], expect[i], 1e-15);
}

class FamilyTest : public ::testing::TestWithParam<Family> {};

TEST_P(FamilyTest, TapsAreOrthonormalQuadratureFilters) {
  const auto w = family_taps(GetParam());
  const auto& h = w.lowpass;
  const double tol = GetParam() == Family::Beylkin ? 1e-11 : 1e-12;
  double sum = 0.0;
  for (double v : h) sum += v;
  EXPECT_NEAR(sum, std::numbers::sqrt2, tol);
  for (std::size_t shift = 0; 2 * shift < h.size(); ++shift) {
    double acc = 0.0;
    for (std::size_t t = 0; t + 2 * shift < h.size(); ++t) acc += h[t] * h[t + 2 * shift];
    EXPECT_NEAR(acc, shift == 0 ? 1.0 : 0.0, tol) << "shift " << shift;
  }
}

TEST_P(FamilyTest, HighpassAnnihilatesPolynomialsBelowMomentCount) {
  const auto w = family_taps(GetParam());
  const auto g = w.highpass();
  for (int p = 0; p <= w.vanishing_moments; ++p) {
    double m = 0.0, scale = 0.0;
    // centered, scaled abscissae keep the moment sums well conditioned
    const double mid = 0.5 * static_cast<double>(g.size() - 1);
    for (std::size_t t = 0; t < g.size(); ++t) {
      const double tp = std::pow((static_cast<double>(t) - mid) / static_cast<double>(g.size()), p);
      m += g[t] * tp;
      scale += std::abs(g[t] * tp);
    }
    if (p < w.vanishing_moments)
      EXPECT_LT(std::abs(m) / scale, 1e-8) << "moment " << p;
    else
      EXPECT_GT(std::abs(m) / scale, 1e-6) << "moment " << p << " should not vanish";
  }
}

TEST_P(FamilyTest, InteriorDetailsOfPolynomialSignalVanish) {
  const auto w = family_taps(GetParam());
  const std::size_t n = 256;
  const int deg = w.vanishing_moments - 1;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::pow(static_cast<double>(i) / n, deg) + 0.5;
  const auto c = dwt_forward(x, w, 7);  // finest level only
  const std::size_t span = w.lowpass.size();
  for (std::size_t k = 0; 2 * k + span <= n; ++k) EXPECT_NEAR(c.beta(7, k), 0.0, 1e-8) << "k=" << k;
}

TEST_P(FamilyTest, ParsevalAndPerfectReconstruction) {
  const auto w = family_taps(GetParam());
  for (std::size_t n : {8u, 64u, 2048u}) {
    const int levels = log2_exact(n);
    for (int j0 : {0, 1, levels - 1}) {
      const auto x = random_signal(n, 100 + n + static_cast<std::size_t>(j0));
      const auto c = dwt_forward(x, w, j0);
      const double ex = energy(x);
      EXPECT_NEAR(c.energy(), ex, 1e-8 * ex) << "n=" << n << " j0=" << j0;
      const auto back = dwt_inverse(c, w);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) err += (back[i] - x[i]) * (back[i] - x[i]);
      EXPECT_LT(std::sqrt(err / ex), 1e-8) << "n=" << n << " j0=" << j0;
    }
  }
}

TEST_P(FamilyTest, ForwardIsLinear) {
  const auto w = family_taps(GetParam());
  const auto a = random_signal(64, 7), b = random_signal(64, 8);
  std::vector<double> s(64);
  for (std::size_t i = 0; i < 64; ++i) s[i] = 2.0 * a[i] - 3.0 * b[i];
  const auto ca = dwt_forward(a, w, 1), cb = dwt_forward(b, w, 1), cs = dwt_forward(s, w, 1);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(cs.data[i], 2.0 * ca.data[i] - 3.0 * cb.data[i], 1e-12);
}

TEST_P(FamilyTest, SynthesisOfUnitCoefficientIsUnitNormAtom) {
  const auto w = family_taps(GetParam());
  auto c = CoefficientSet::zeros(1, 6);
  c.at(4, 5) = 1.0;
  const auto atom = dwt_inverse(c, w);
  EXPECT_NEAR(atom.energy(), 1.0, 1e-10);
  const auto back = dwt_forward(atom, w, 1);
  for (std::size_t i = 0; i < back.size(); ++i)
    EXPECT_NEAR(back.data[i], i == c.offset(4, 5) ? 1.0 : 0.0, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, FamilyTest, ::testing::ValuesIn(kAllFamilies),
                         [](const auto& info) { return to_string(info.param); });

TEST(Wavelet, FamilyNamesRoundTripCaseInsensitively) {
  for (Family f : kAllFamilies) {
    EXPECT_EQ(family_from_string(to_string(f)), f);
    std::string upper = to_string(f);
    for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    EXPECT_EQ(family_from_string(upper), f);
  }
}

TEST(Wavelet, RejectsInvalidInput) {
  const auto w = family_taps(Family::Haar);
  try {
    dwt_forward(std::vector<double>(6, 1.0), w, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidLength);
  }
  try {
    dwt_forward(std::vector<double>(8, 1.0), w, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidScale);
  }
  CoefficientSet bad;
  bad.j0 = 1;
  bad.jmax = 3;
  bad.data.assign(10, 0.0);
  try {
    dwt_inverse(bad, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidCoefficients);
  }
  try {
    family_from_string("mexican_hat");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownFamily);
  }
  EXPECT_THROW(Curve(std::vector<double>{1.0, NAN}), Error);
}

TEST(Wavelet, CoefficientAddressing) {
  const auto c = CoefficientSet::zeros(2, 5);
  EXPECT_EQ(c.size(), 64u);
  EXPECT_EQ(c.offset(1, 3), 3u);   // scaling block
  EXPECT_EQ(c.offset(2, 0), 4u);
  EXPECT_EQ(c.offset(5, 31), 63u);
  EXPECT_FALSE(c.contains(6, 0));
  EXPECT_FALSE(c.contains(1, 4));
  EXPECT_THROW(c.offset(0, 0), Error);
}

}  // namespace
