#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace casbr {

// SplitMix64 step/finalizer (Vigna). Bijective with full avalanche; the
// whole toolkit routes randomness through it so streams are bit-identical
// across platforms and compilers.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Identifies one reproducible random stream. Equal (master_seed,
// stream_index) pairs give byte-identical draw sequences everywhere.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  // Child stream; distinct salts give statistically independent streams
  // under the same master seed.
  constexpr RngSeed derive(std::uint64_t salt) const noexcept {
    return {master_seed, splitmix64(stream_index ^ (salt * 0x9e3779b97f4a7c15ULL))};
  }

  constexpr std::uint64_t state() const noexcept {
    return splitmix64(splitmix64(master_seed) ^ stream_index);
  }
};

class Rng {
 public:
  explicit constexpr Rng(RngSeed seed) noexcept : state_(seed.state()) {}

  constexpr std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  constexpr double next_unit() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  constexpr bool bernoulli(double p) noexcept { return next_unit() < p; }

  // Uniform in [0, n); unbiased via modulo rejection.
  constexpr std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    std::uint64_t x = next_u64();
    std::uint64_t r = x % n;
    while (x - r > ~std::uint64_t{0} - (n - 1)) {
      x = next_u64();
      r = x % n;
    }
    return r;
  }

  // Geometric count of successes before the first failure, capped. The cap
  // keeps p == 1 finite.
  constexpr std::size_t geometric_capped(double p, std::size_t cap) noexcept {
    std::size_t g = 0;
    while (g < cap && bernoulli(p)) ++g;
    return g;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Stateless uniform in [0,1) addressed by (base, key). The same key always
// sees the same draw for a given base, independent of evaluation order.
constexpr double keyed_unit(std::uint64_t base, std::uint64_t key) noexcept {
  return static_cast<double>(splitmix64(base ^ splitmix64(key)) >> 11) * 0x1.0p-53;
}

}  // namespace casbr
