#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace panicle {

/// Seeded pseudo-random source with a pinned, portable derivation of every
/// variate from the raw std::mt19937_64 stream (whose output sequence is fixed
/// by the C++ standard). The standard distributions are implementation
/// defined, so none are used here.
///
///   uniform()        = (next() >> 11) * 2^-53                      in [0, 1)
///   below(n)         = next() % n, redrawn while next() >= 2^64 - (2^64 mod n)
///   normal(mu, sd)   = mu + sd * sqrt(-2 ln(1 - u1)) * cos(2 pi u2)  (one draw per pair)
///   bernoulli(p)     = uniform() < p
///   shuffle(v)       = Fisher-Yates, i from n-1 down to 1, swap(v[i], v[below(i+1)])
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n);

    double normal(double mean, double sd);

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace panicle
