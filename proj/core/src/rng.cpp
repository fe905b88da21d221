#include "lsgda/rng.hpp"

#include <cmath>

#include "lsgda/errors.hpp"

namespace lsgda {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr double kTwoPi = 6.283185307179586476925287;

inline uint64_t rotl(uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

uint64_t mix64(uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

uint64_t splitmix64_next(uint64_t& state) noexcept {
  state += kGolden;
  return mix64(state);
}

uint64_t derive_worker_seed(uint64_t master_seed, uint64_t node_id) noexcept {
  return mix64(master_seed ^ (node_id * kGolden));
}

RngStream::RngStream(uint64_t seed) noexcept {
  uint64_t sm = seed;
  for (int i = 0; i < 4; ++i) s_[i] = splitmix64_next(sm);
}

uint64_t RngStream::next_u64() noexcept {
  const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform();
}

uint64_t RngStream::bounded(uint64_t bound) {
  if (bound == 0) throw ConfigError("RngStream::bounded: bound must be >= 1");
  unsigned __int128 m =
      static_cast<unsigned __int128>(next_u64()) * bound;
  auto lo = static_cast<uint64_t>(m);
  if (lo < bound) {
    const uint64_t threshold = (0ull - bound) % bound;
    while (lo < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

double RngStream::normal() noexcept {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // u1 in (0, 1] so the log argument never vanishes.
  const double u1 =
      static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = kTwoPi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

double RngStream::normal(double mean, double stddev) noexcept {
  return mean + stddev * normal();
}

}  // namespace lsgda
