#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace zext {

// Seeded generator used by every sampler in the library. Output is stable
// across platforms: the engine is std::mt19937_64 (fully specified by the
// standard) and bounded draws use our own reduction instead of the
// implementation-defined std distributions.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64+splitmix64/v1";

  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  // Independent substream keyed by (seed, stream). Used for per-edge
  // matchings so samples do not depend on iteration order.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Uniform permutation of 0..size-1 by Fisher-Yates.
  std::vector<std::uint32_t> permutation(std::size_t size) {
    std::vector<std::uint32_t> perm(size);
    for (std::size_t i = 0; i < size; ++i) perm[i] = static_cast<std::uint32_t>(i);
    shuffle(perm);
    return perm;
  }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace zext
