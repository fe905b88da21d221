#pragma once

#include <cstdint>

namespace lsgda {

// Deterministic random-number machinery. Every generator below is defined by
// explicit integer arithmetic, so streams are bit-reproducible across
// platforms and standard libraries (the <random> distributions are not).

// SplitMix64 finalizer: bijective 64-bit mix.
uint64_t mix64(uint64_t z) noexcept;

// One SplitMix64 step: advances `state` by the odd constant 0x9E3779B97F4A7C15
// and returns mix64 of the new state.
uint64_t splitmix64_next(uint64_t& state) noexcept;

// Seed for a worker's private stream: mix64(master_seed XOR node_id * odd
// constant). Pure, and injective in node_id for a fixed master_seed (both the
// finalizer and multiplication by an odd constant are bijections mod 2^64).
uint64_t derive_worker_seed(uint64_t master_seed, uint64_t node_id) noexcept;

// xoshiro256++ stream with hand-rolled floating-point and bounded-integer
// draws. State transition:
//   result = rotl(s0 + s3, 23) + s0
//   t = s1 << 17; s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
//   s3 = rotl(s3, 45)
// The four state words are seeded with consecutive SplitMix64 outputs.
// normal() uses Box-Muller on two uniform draws and caches the second value
// of each pair, so the cache is part of the stream state.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) noexcept;

  uint64_t next_u64() noexcept;

  // Uniform in [0, 1), 53-bit resolution: (next_u64() >> 11) * 2^-53.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;

  // Uniform integer in [0, bound); Lemire multiply-and-reject, bias-free.
  // bound must be >= 1.
  uint64_t bounded(uint64_t bound);

  // Standard normal via Box-Muller; draws two uniforms per pair, where the
  // log argument is taken in (0, 1] to avoid log(0).
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept;

 private:
  uint64_t s_[4];
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace lsgda
