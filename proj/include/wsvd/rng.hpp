#ifndef WSVD_RNG_HPP
#define WSVD_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace wsvd {

/// Seeded random source with self-contained distributions.
///
/// mt19937_64 output is fixed by the standard, but the standard library's
/// distribution objects are not; bounded ints, uniforms, and normals are
/// produced here by hand so that identical seeds give identical streams on
/// every platform and standard library.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t rem = std::uint64_t(-1) % bound;
        const std::uint64_t limit = std::uint64_t(-1) - rem; // multiple of bound
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return v % bound;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return double(gen_() >> 11) * 0x1.0p-53; }

    /// Standard normal draw (Box-Muller, caching the paired value).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - unit(); // (0, 1], keeps log() finite
        const double u2 = unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace wsvd

#endif
