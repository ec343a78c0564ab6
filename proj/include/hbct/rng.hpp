#pragma once

#include <cmath>
#include <cstdint>

namespace hbct {

// Deterministic 64-bit generator (splitmix64). Chosen over std::mt19937_64
// plus std distributions because the distribution implementations are not
// pinned by the standard; every draw here is bit-reproducible anywhere.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double strictly inside (0,1).
  double uniform01() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Unit-mean exponential draw; strictly positive and finite.
  double exponential() { return -std::log(uniform01()); }
};

/// Derives an independent child seed from (master, stream index); used to
/// give every Monte-Carlo trial its own stream so parallel and serial runs
/// produce identical results.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  SplitMix64 mix(master ^ (0x6A09E667F3BCC909ull + stream * 0x9E3779B97F4A7C15ull));
  mix.next();
  return mix.next();
}

}  // namespace hbct
