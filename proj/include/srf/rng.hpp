#pragma once

#include <cstdint>
#include <cmath>

namespace srf {

/// Counter-based splittable RNG (splitmix64 core).  Every consumer derives
/// its stream from (seed, stream_id), which keeps parallel and sequential
/// runs byte-identical.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0)
        : state_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// uniform in [a,b)
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    /// standard normal (Box-Muller, one value per call for determinism)
    double normal() {
        double u1 = next_double();
        while (u1 <= 1e-300) u1 = next_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    Rng split(uint64_t stream) const { return Rng(state_, stream); }

private:
    uint64_t state_;
};

} // namespace srf
