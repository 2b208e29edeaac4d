#pragma once

#include <cstdint>
#include <random>

namespace genreg {

// splitmix64 step; the replication seed derivation below is the published
// mixing function referenced in the README.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// seed_rep = mix(seed, n, rep): counter-based, so any subset of replications
// can be re-run independently.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t rep) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s ^= n * 0x9e3779b97f4a7c15ULL;
    std::uint64_t b = splitmix64(s);
    s ^= rep * 0xd1b54a32d192ed03ULL;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

// Deterministic stream built on mt19937_64 (fully specified by the standard).
// normal() is a plain Box-Muller pair without caching so the draw sequence is
// a simple function of the engine state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform01() {
        // 53-bit mantissa in [0,1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    // standard normal conditioned on |z| <= c, by rejection
    double truncated_normal(double c);

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

} // namespace genreg
