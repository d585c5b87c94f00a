#include "gcfluct/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gcfluct {

double Rng::normal() {
  double u1 = uniform_open01();
  double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::bounded(std::uint64_t bound) {
  __uint128_t m = static_cast<__uint128_t>(next_u64()) * bound;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < bound) {
    std::uint64_t threshold = (-bound) % bound;
    while (lo < threshold) {
      m = static_cast<__uint128_t>(next_u64()) * bound;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::int64_t sample_binomial(Rng& rng, std::int64_t trials, double p) {
  if (trials < 0 || !(p >= 0.0) || !(p <= 1.0)) {
    throw std::domain_error("sample_binomial: need trials >= 0 and p in [0,1]");
  }
  if (trials == 0 || p == 0.0) return 0;
  if (p == 1.0) return trials;
  if (p > 0.5) return trials - sample_binomial(rng, trials, 1.0 - p);

  const double log_q = std::log1p(-p);
  std::int64_t remaining = trials;
  std::int64_t successes = 0;
  for (;;) {
    // failures before the next success
    double gap = std::floor(std::log(rng.uniform_open01()) / log_q);
    if (!(gap < static_cast<double>(remaining))) break;
    ++successes;
    remaining -= static_cast<std::int64_t>(gap) + 1;
    if (remaining <= 0) break;
  }
  return successes;
}

}  // namespace gcfluct
