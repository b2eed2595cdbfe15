#include "panicle/rng.hpp"

#include <cmath>
#include <numbers>

namespace panicle {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1) return 0;
    // 2^64 mod n, computed without overflow.
    const std::uint64_t excess = (0 - n) % n;
    while (true) {
        const std::uint64_t x = next();
        if (x <= UINT64_MAX - excess) return x % n;
    }
}

double Rng::normal(double mean, double sd) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace panicle
