#pragma once

#include <cmath>
#include <cstdint>

namespace gss {

// Counter-based generator: a stateless hash of (seed, stream, counter).
// A draw depends only on its coordinates, never on call order, so
// concurrent sweeps and common-random-number optimization stay
// bit-reproducible.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t bits(std::uint64_t counter) const {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (stream_ + 1);
        z = mix(z ^ mix(counter + 0x9e3779b97f4a7c15ull));
        return mix(z);
    }

    // uniform in [0,1)
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // standard normal pair via Box-Muller; consumes counters 2i and 2i+1
    void normal_pair(std::uint64_t i, double& z0, double& z1) const {
        const double u1 = 1.0 - uniform(2 * i); // (0,1]
        const double u2 = uniform(2 * i + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        z0 = r * std::cos(2.0 * M_PI * u2);
        z1 = r * std::sin(2.0 * M_PI * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
};

// Stream ids keep independent noise sources on disjoint counter spaces.
enum RngStream : std::uint64_t {
    kStreamSymbols = 1,
    kStreamTxNoise = 2,
    kStreamRxNoise = 3,
    kStreamInterleaver = 4,
    kStreamInfoBits = 5,
    kStreamAwgn = 6,
};

} // namespace gss
