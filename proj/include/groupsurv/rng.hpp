#pragma once

#include <cstdint>

namespace groupsurv::mc {

inline std::uint64_t scramble64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// SplitMix64 stream. Cheap to construct, so every trial gets its own.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        return scramble64(z);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Substream for one trial, a pure function of (seed, trial_index); trials can
// run in any order or on any worker and still see the same draws.
inline SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial_index) {
    return SplitMix64(scramble64(scramble64(seed) + trial_index * 0x9E3779B97F4A7C15ull));
}

}  // namespace groupsurv::mc
