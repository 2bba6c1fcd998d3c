#pragma once

#include <cmath>
#include <cstdint>

namespace divplan {

/// Portable seeded generator (splitmix64). All randomness in the library
/// (class sampling, noise streams, clustering init) flows through this one
/// algorithm so outputs are reproducible bit-for-bit across platforms.
/// The identifier recorded in manifests is "splitmix64-fy-v1".
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), rejection-sampled to stay unbiased.
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller (cosine branch only, deterministic).
    double next_gaussian() {
        double u1 = next_double();
        const double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

  private:
    std::uint64_t state_;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// Derives an independent stream from a base seed and up to three indices.
/// Order-free reproducibility: every (seed, a, b, c) maps to a fixed stream
/// regardless of how many other streams were consumed before it.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                                std::uint64_t c = 0) {
    std::uint64_t s = detail::mix64(seed ^ 0xd1b54a32d192ed03ULL);
    s = detail::mix64(s ^ detail::mix64(a ^ 0x8cb92ba72f3d8dd7ULL));
    s = detail::mix64(s ^ detail::mix64(b ^ 0xaef17502108ef2d9ULL));
    s = detail::mix64(s ^ detail::mix64(c ^ 0x9e6c63d0a48d1a1fULL));
    return SplitMix64(s);
}

}  // namespace divplan
