#pragma once
/*
 * Deterministic random-stream kit: splitmix64 for seeding and stream
 * derivation, xoshiro256++ as the workhorse generator.  Distinct
 * (seed, stream) pairs give independent sequences, so Monte-Carlo trials
 * can run in any order on any number of threads with identical results.
 */

#include <bit>
#include <cmath>
#include <cstdint>

namespace csbp {

struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

namespace rng_detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace rng_detail

/// One-shot splitmix64 mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
  return rng_detail::splitmix64_next(x);
}

class RandomStream {
 public:
  explicit RandomStream(RngSeed s) noexcept {
    std::uint64_t st = s.seed ^ mix64(s.stream ^ 0x5851f42d4c957f2dULL);
    s_[0] = rng_detail::splitmix64_next(st);
    s_[1] = rng_detail::splitmix64_next(st);
    s_[2] = rng_detail::splitmix64_next(st);
    s_[3] = rng_detail::splitmix64_next(st);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 1;  // all-zero state is invalid
  }

  std::uint64_t next_u64() noexcept {  // xoshiro256++
    const std::uint64_t result = rng_detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rng_detail::rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n); n must be positive.  Unbiased (rejection).
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x >= threshold) return x % n;
    }
  }

  /// Standard normal deviate (Box-Muller, spare value cached).
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.28318530717958647692528676655900577 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream id for one Monte-Carlo trial.  Absorbs, in order, the base seed,
/// the problem size, the bit pattern of rho and the trial index through
/// splitmix64; changing any single input decorrelates the whole stream.
inline std::uint64_t trial_stream(std::uint64_t base_seed, std::uint64_t n,
                                  double rho, std::uint64_t trial) noexcept {
  std::uint64_t h = mix64(base_seed);
  h = mix64(h ^ n);
  h = mix64(h ^ std::bit_cast<std::uint64_t>(rho));
  h = mix64(h ^ trial);
  return h;
}

}  // namespace csbp
