#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "grabforest/law.hpp"

namespace grabforest {

// 64-bit Mersenne Twister keyed by (seed, stream). Streams are derived with
// the SplitMix64 finalizer so replicas get independent, reproducible
// sequences no matter which thread runs them.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr const char* kGenerator = "mt19937_64";
  static constexpr const char* kStreamDerivation =
      "splitmix64(splitmix64(seed) ^ splitmix64(stream + 1))";

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Inverse-CDF sampler for a finitely supported law.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const FloatLaw& law);
  Degree operator()(Rng& rng) const;

 private:
  std::vector<Degree> values_;
  std::vector<double> cdf_;
};

// Fisher-Yates shuffle driven by Rng::uniform_below.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.uniform_below(i)]);
  }
}

}  // namespace grabforest
