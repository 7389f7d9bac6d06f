#pragma once

#include <cstdint>
#include <random>

namespace catagg {

/// Deterministic RNG helpers. std::uniform_*_distribution is
/// implementation-defined, so draws are derived from raw mt19937_64
/// output to keep generated artifacts reproducible byte-for-byte.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) via rejection (bound > 0).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % bound;
    }

    int range(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (eng_() & 1u) != 0; }

    /// Standard normal via Box-Muller on raw uniforms.
    double normal();

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace catagg
