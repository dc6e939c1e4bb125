#pragma once

#include <cstdint>

namespace belldet {

// SplitMix64. Small, fast, and identical on every platform, which is what the
// seed-pinned reproduction targets need (std:: engines/distributions are not
// guaranteed bit-stable across standard libraries).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased uniform draw from [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
};

// Decorrelates substreams (e.g. per-restart engines) from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
  return g.next();
}

}  // namespace belldet
