#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sparsegnn {

/// Seedable 64-bit random generator with a fixed algorithm: the engine is
/// std::mt19937_64 (bit-exact by the standard) and the real-valued
/// transforms are spelled out here instead of using the standard
/// distributions, whose output is implementation-defined.
///
/// Streams are consumed in a documented order by the synthetic dataset
/// builder and the weight initializer, so results reproduce bit-for-bit
/// for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via the Box-Muller transform; the second value of
    /// each pair is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        // u1 == 0 would take log(0); nudge into (0, 1].
        double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        // rejection sampling to avoid modulo bias
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x > limit);
        return x % bound;
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace sparsegnn
