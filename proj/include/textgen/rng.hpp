#pragma once

#include <cstdint>

namespace textgen {

// Counter-seeded splittable PRNG. Every sample of a run owns an independent
// stream derived from (run_seed, sample_index), so results do not depend on
// worker count or scheduling order.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // Warm up so that nearby seeds decorrelate immediately.
        next_u64();
        next_u64();
    }

    static uint64_t mix(uint64_t seed, uint64_t index) {
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static Rng for_index(uint64_t seed, uint64_t index) {
        return Rng(mix(seed, index));
    }

    uint64_t next_u64() {
        // splitmix64 step
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [lo, hi] inclusive. Debiased via rejection.
    int64_t uniform_int(int64_t lo, int64_t hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<int64_t>(next_u64());  // full range
        uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return lo + static_cast<int64_t>(v % span);
    }

    uint64_t uniform_index(uint64_t n) {
        return static_cast<uint64_t>(uniform_int(0, static_cast<int64_t>(n) - 1));
    }

    // Uniform real in [lo, hi).
    double uniform_real(double lo, double hi) {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    bool bernoulli(double p) { return uniform_real(0.0, 1.0) < p; }

private:
    uint64_t state_;
};

}  // namespace textgen
