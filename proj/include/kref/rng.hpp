#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kref {

/// Seedable RNG with portable derived draws. The engine is std::mt19937_64
/// (bit-identical across platforms); bounded draws use rejection sampling on
/// the raw 64-bit stream instead of std::uniform_int_distribution, whose
/// output is implementation-defined. Instances generated from a seed therefore
/// reproduce everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    /// Uniform in [0, bound). bound > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % bound;
    }

    int sign() { return (eng_() & 1) ? 1 : -1; }

    /// Uniform double in [0,1) with 53 random bits.
    double real() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return real() < p; }

    /// Sorted k-subset of {1..n}, uniform.
    std::vector<int> subset(int n, int k);

    /// k distinct values from {1..n} in draw order (scope tuple).
    std::vector<int> tuple_distinct(int n, int k);

  private:
    std::mt19937_64 eng_;
};

}  // namespace kref
