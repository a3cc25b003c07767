#pragma once

#include <cstdint>

namespace distreg {

/// splitmix64: the 64-bit mixing generator of Steele, Lea and Flood. Small,
/// seedable and splittable, with identical output on every platform, so
/// generated datasets are reproducible bit-for-bit.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53 mantissa bits.
    double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1).
    double next_symmetric() noexcept { return 2.0 * next_unit() - 1.0; }

    /// An independent generator derived from this one's stream.
    SplitMix64 split() noexcept { return SplitMix64(next() ^ 0x9E3779B97F4A7C15ull); }

private:
    std::uint64_t state_;
};

}  // namespace distreg
