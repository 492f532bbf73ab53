#pragma once

#include <cstdint>

namespace banditlab::engine {

// SplitMix64. Small, fast, and reproducible across platforms; the whole
// experiment pipeline depends on this exact stream.
struct Rng {
    uint64_t state = 0;

    explicit Rng(uint64_t seed = 0) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1); 53-bit mantissa so the result is always < 1.0
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform index in [0, n), n > 0
    uint64_t next_index(uint64_t n) { return next() % n; }
};

}  // namespace banditlab::engine
