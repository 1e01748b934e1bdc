#include "grabforest/random.hpp"

#include <algorithm>

namespace grabforest {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 1))) {}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection of the biased low zone.
  auto x = engine_();
  auto m = static_cast<unsigned __int128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = engine_();
      m = static_cast<unsigned __int128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

DiscreteSampler::DiscreteSampler(const FloatLaw& law) {
  double acc = 0.0;
  for (const auto& e : law.entries()) {
    values_.push_back(e.value);
    acc += e.prob;
    cdf_.push_back(acc);
  }
  cdf_.back() = 1.0;
}

Degree DiscreteSampler::operator()(Rng& rng) const {
  if (values_.size() == 1) return values_.front();
  const double u = rng.uniform01();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return values_[static_cast<std::size_t>(it - cdf_.begin())];
}

}  // namespace grabforest
