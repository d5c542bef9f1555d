#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "emakit/errors.hpp"

namespace emakit {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic xoshiro256++ generator with explicit seeding and derived
// streams. Sampling helpers are implemented here rather than through
// <random> distributions, whose output is implementation-defined; every
// draw is reproducible from the seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Standard normal via Box-Muller; the second deviate is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log1p(-u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Unbiased integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw ConfigError("Rng::next_below: bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw = next_u64();
    while (draw >= limit) draw = next_u64();
    return draw % bound;
  }

  int next_bernoulli(double p) { return next_unit() < p ? 1 : 0; }

  // Independent generator for a sub-task; identical (seed, stream) pairs
  // yield identical streams regardless of draw order elsewhere.
  Rng child(std::uint64_t stream) const { return Rng(derive(seed_, stream)); }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (stream + 1));
    std::uint64_t z = splitmix64(s);
    return z ^ splitmix64(s);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(values[i - 1], values[j]);
  }
}

// k distinct indices drawn from [0, n), in selection order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  if (k > n) k = n;
  std::vector<std::size_t> picked;
  picked.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(pool[i], pool[j]);
    picked.push_back(pool[i]);
  }
  return picked;
}

}  // namespace emakit
