#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace thue {

// mt19937_64 is fully specified by the standard, so sequences are portable.
// uniform_int_distribution is NOT (implementation-defined), hence the
// rejection sampler below: unbiased and identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform draw from [0, bound), bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
      std::uint64_t v = eng_();
      if (v < limit) return v % bound;
    }
  }

 private:
  std::mt19937_64 eng_;
};

// splitmix64 step; used to derive independent per-trial seeds from a master
// seed plus indices, deterministically.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

}  // namespace thue
