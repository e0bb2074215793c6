#pragma once

#include <cstdint>
#include <string_view>

namespace kbregex {

// splitmix64. All sampling goes through this so that outputs are identical
// across platforms (std:: distributions are implementation-defined).
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound), bound > 0
    uint64_t next_below(uint64_t bound) {
        // rejection sampling keeps the draw unbiased
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }
};

// Derive a named sub-stream from a master seed. Components re-seeded through
// this can be re-run in isolation without disturbing each other.
inline uint64_t mix_stream(uint64_t seed, std::string_view name, uint64_t index = 0) {
    uint64_t h = 0xcbf29ce484222325ull ^ seed;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    h ^= index + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    Rng r(h);
    return r.next();
}

}  // namespace kbregex
