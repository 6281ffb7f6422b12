#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mtae {

// SplitMix64 mixer. Used for index hashing and for deriving independent
// seed streams from a single user-facing seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// All randomness in the project flows through this wrapper. mt19937_64 is
// fully specified by the standard, and the draw helpers below avoid
// std::uniform_*_distribution, whose output is implementation-defined.
// Same seed therefore means the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1) with 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n); n must be positive
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

// Fisher-Yates with draws from Rng; std::shuffle is not reproducible
// across standard libraries.
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace mtae
