#pragma once

#include <cstdint>
#include <random>

namespace vlp {

/// The single generator behind every seeded draw: std::mt19937_64 (whose output
/// sequence is fixed by the standard) with hand-rolled distributions, so draws are
/// bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [0, n), rejection sampled.
    std::uint64_t below(std::uint64_t n)
    {
        if (n <= 1)
            return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Independent stream for a labelled sub-experiment.
    Rng fork(std::uint64_t stream) { return Rng(engine_() ^ (0x9E3779B97F4A7C15ULL * (stream + 1))); }

private:
    std::mt19937_64 engine_;
};

} // namespace vlp
