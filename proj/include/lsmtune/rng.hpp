#pragma once

#include <cstdint>

namespace lsmtune {

// Deterministic splittable generator (splitmix64). Used everywhere randomness
// is needed so that outputs are reproducible across platforms and standard
// library implementations.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double next_double() { return double(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). Modulo bias is below 1e-15 for the ranges used here.
    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
        return lo + std::int64_t(next_below(std::uint64_t(hi - lo + 1)));
    }

    // Derive an independent stream for a sub-task.
    SplitMix64 split(std::uint64_t salt) {
        SplitMix64 s(state ^ (salt * 0xd6e8feb86659fd93ULL));
        s.next();
        return s;
    }
};

inline const char* kRngName = "splitmix64";

} // namespace lsmtune
