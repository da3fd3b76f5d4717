#pragma once

#include <cstdint>

namespace chainnet {

// splitmix64 (Steele/Lea/Flood, public domain). Chosen because the whole
// sequence is pinned by the algorithm itself: fixed seeds reproduce the same
// stream on any platform or toolchain, which golden files depend on.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Bounded draw by modulo reduction; the bias is immaterial at the bounds
    // used here and the reduction is portable.
    std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

    // Uniform in [0, 1) from the top 53 bits.
    double next_double() { return double(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace chainnet
