#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace vball {

// Seeded RNG with explicitly coded distributions. std::normal_distribution and
// friends are implementation-defined, which would break byte-identical replay
// across toolchains; everything here is fully specified.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : base_(seed), engine_(mix(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
        const std::uint64_t limit = max - max % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    double normal(double mean = 0.0, double sigma = 1.0) {
        // Box-Muller, one sample per call (the spare is discarded so the
        // stream depends only on the call sequence).
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * M_PI * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    // Independent child stream; depends only on the constructor seed and the
    // stream id, never on how much of this stream was consumed.
    Rng split(std::uint64_t stream_id) const {
        return Rng(mix(base_ ^ mix(stream_id + 0x517cc1b727220a95ULL)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        // SplitMix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t base_;
    std::mt19937_64 engine_;
};

}  // namespace vball
