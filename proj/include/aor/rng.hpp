#pragma once

#include <cstdint>
#include <random>

namespace aor {

// Seeded generator with hand-rolled distributions. std::uniform_*_distribution
// output is implementation-defined, so deriving values directly from the
// mt19937_64 stream keeps seeded corpora identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n), n > 0. Rejection keeps the draw unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t v;
    do {
      v = gen_();
    } while (v > limit);
    return v % n;
  }

  bool coin() { return (gen_() & 1) != 0; }

  // +1 or -1 with equal probability.
  double sign() { return coin() ? 1.0 : -1.0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace aor
