#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mamdi::rng {

// 64-bit FNV-1a over an arbitrary byte sequence; used to derive independent
// substream identities from (seed, label, block) without any draw-order
// coupling between substreams.
inline std::uint64_t fnv1a(std::string_view bytes,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a_u64(std::uint64_t v, std::uint64_t h) {
  for (int i = 0; i < 8; ++i) {
    h ^= static_cast<unsigned char>(v >> (8 * i));
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic labeled random stream (xoshiro256++). A stream is fully
// identified by (seed, label, block): adding or removing draws on one stream
// never perturbs any other, and block-partitioned runs merge identically
// regardless of execution order.
class Stream {
 public:
  Stream(std::uint64_t seed, std::string_view label, std::uint64_t block = 0) {
    std::uint64_t h = fnv1a_u64(seed, 0xcbf29ce484222325ULL);
    h = fnv1a(label, h);
    h = fnv1a_u64(block, h);
    for (auto& w : s_) w = splitmix64(h);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;  // invalid all-zero state
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Number of attempts until first success, support {1, 2, ...}.
  // Inversion: P(N <= k) = 1 - (1-p)^k exactly. Aborts past the cap so a
  // vanishing success probability fails loudly instead of spinning.
  std::uint64_t geometric(double p) {
    if (!(p > 0.0) || p > 1.0)
      throw std::domain_error("geometric: success probability must lie in (0, 1], got " +
                              std::to_string(p));
    if (p == 1.0) return 1;
    const double u = uniform();
    const double n = std::ceil(std::log1p(-u) / std::log1p(-p));
    constexpr double cap = 1e9;
    if (n > cap)
      throw std::runtime_error("geometric: attempt count " + std::to_string(n) +
                               " exceeds cap 1e9 at success probability " + std::to_string(p));
    return n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
  }

  // Small-mean Poisson sampler (product-of-uniforms). Means used here are
  // per-pulse photon numbers, always far below the guard.
  std::uint64_t poisson(double mean) {
    if (mean < 0.0) throw std::domain_error("poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean > 60.0) throw std::domain_error("poisson: mean above supported range (60)");
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace mamdi::rng
