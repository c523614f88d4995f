#pragma once

#include <cstdint>
#include <string_view>

#include "smudge/util.hpp"

namespace smudge {

/// splitmix64 step; also used to expand a single seed into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded via splitmix64. All randomness in the project flows
/// through this generator so that runs are reproducible from a single
/// 64-bit seed, independent of platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform_real(double lo, double hi) { return lo + next_double() * (hi - lo); }

    /// Unbiased uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_u64(std::uint64_t bound) {
        // rejection sampling on the top bits
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(uniform_u64(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    bool next_bool() { return (next_u64() >> 63) != 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

/// Deterministic child seed: mixes a base seed with a textual tag.
/// Positional, not sequential, so derived streams do not depend on the
/// order in which siblings are created.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    std::uint64_t s = base ^ fnv1a64(tag);
    return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view a, std::string_view b) {
    std::uint64_t s = base ^ fnv1a64(a);
    s = splitmix64(s) ^ fnv1a64(b);
    return splitmix64(s);
}

} // namespace smudge
