#pragma once

#include <cstdint>

namespace gcfluct {

// Counter-based pseudorandom generator (splitmix64). The k-th output is a
// pure function of (seed, k), so streams can be split, replayed and compared
// across runs without shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform on [0, 1), 53-bit resolution
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1], safe as a log() argument
  double uniform_open01() { return 1.0 - uniform01(); }

  // standard normal via Box-Muller; consumes two uniforms, keeps no spare
  double normal();

  // unbiased integer in [0, bound), bound >= 1 (Lemire's method)
  std::uint64_t bounded(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

// Derives the seed of stream `stream` from a master seed. Used so that
// replication r is independent of which worker runs it.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream);

// Exact Binomial(trials, p) sample. Uses geometric gap skipping, so the cost
// is O(trials * p + 1) rather than O(trials).
std::int64_t sample_binomial(Rng& rng, std::int64_t trials, double p);

}  // namespace gcfluct
