#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dagsim {

/// Deterministic random stream. All draws go through explicit inverse-CDF
/// transforms of raw 64-bit output so results are identical across standard
/// library implementations.
class Rng {
public:
    Rng() : eng_(0x5eed) {}
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Derives an independent stream from a master seed and a stream tag.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed ^ mix(stream + 0x1234abcd)));
    }

    std::uint64_t next() { return eng_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return double(eng_() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n); n must be positive.
    std::size_t uniform_index(std::size_t n) {
        std::size_t i = std::size_t(uniform01() * double(n));
        return i >= n ? n - 1 : i;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate) {
        double u = uniform01();
        double gap = -std::log1p(-u) / rate;
        return gap > 1e-12 ? gap : 1e-12;
    }

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace dagsim
