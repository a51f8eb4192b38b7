// rng.hpp - seed derivation and small sampling helpers
#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace hybrid {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream for (seed, salt); used for per-node and per-phase RNGs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed ^ splitmix64(salt + 0x51ed2701ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

// Eight-byte generator for per-node streams; n of these stay cheap.
class NodeRng {
 public:
  using result_type = std::uint64_t;
  explicit NodeRng(std::uint64_t seed = 0) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Uniform in [0,1). Spelled out so results match across standard libraries.
template <class G>
double uniform01(G& rng) {
  return static_cast<double>(rng() >> 11) * 0x1p-53;
}

// Uniform in [0, bound) by rejection, again library independent.
template <class G>
std::uint64_t uniform_below(G& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

template <class G>
bool bernoulli(G& rng, double p) {
  return uniform01(rng) < p;
}

// Fisher-Yates with uniform_below, for the same portability reason.
template <class It, class G>
void portable_shuffle(It first, It last, G& rng) {
  auto n = last - first;
  for (decltype(n) i = n - 1; i > 0; --i) {
    auto j = static_cast<decltype(n)>(uniform_below(rng, static_cast<std::uint64_t>(i + 1)));
    std::swap(first[i], first[j]);
  }
}

}  // namespace hybrid
