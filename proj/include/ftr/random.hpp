#pragma once

// Seeded randomness shared by the generator and the evaluation protocols.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions come from Boost.Random rather than <random>: the
// std:: distributions are implementation-defined, Boost's are not, so a
// (seed, stream) pair yields the same draws on every toolchain.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace ftr {

using Rng = std::mt19937_64;

/// Mixes a base seed with stream identifiers into an independent 64-bit seed.
/// std::seed_seq::generate is fully specified, so this is portable.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * stream.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto s : stream) push(s);
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream = {}) {
  return Rng(derive_seed(seed, stream));
}

inline double uniform01(Rng& rng) {
  return boost::random::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double normal(Rng& rng, double mean, double sd) {
  return boost::random::normal_distribution<double>(mean, sd)(rng);
}

inline int poisson(Rng& rng, double lambda) {
  if (lambda <= 0.0) return 0;
  return boost::random::poisson_distribution<int, double>(lambda)(rng);
}

inline double gamma(Rng& rng, double shape) {
  return boost::random::gamma_distribution<double>(shape, 1.0)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
  return boost::random::bernoulli_distribution<double>(p)(rng);
}

/// Uniform integer in [lo, hi].
inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return boost::random::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Fisher-Yates shuffle driven by uniform_index (std::shuffle is not portable).
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, 0, i - 1);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace ftr
