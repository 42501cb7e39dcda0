// rng.hpp — deterministic, platform-independent random source.
//
// Every place the library draws randomness goes through SplitMix64 so that a
// given seed reproduces the same run bit for bit, independent of the standard
// library's distribution implementations.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace cohmeter {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform index in [0, m).
    std::size_t index(std::size_t m) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(m)) % m;
    }

    // Standard normal via Box-Muller (second value discarded).
    double gaussian() {
        double u = (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        double v = uniform();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
    }

    std::complex<double> complex_gaussian() {
        double re = gaussian();
        double im = gaussian();
        return {re, im};
    }

    // Derives an independent stream seed from (seed, stream index).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 g(seed ^ (0x5851f42d4c957f2dull * (stream + 1)));
        return g.next();
    }

private:
    std::uint64_t state_;
};

}  // namespace cohmeter
