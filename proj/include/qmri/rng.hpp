#ifndef QMRI_RNG_HPP
#define QMRI_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace qmri {

// Deterministic, platform-independent PRNG. std::mt19937_64 would do for the
// engine, but the standard leaves distribution output unspecified, and mask
// generation / phantom noise must be bit-reproducible everywhere.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Mixes an index stream into a seed; used to derive per-(i,j) mask seeds and
// per-sample noise without correlations.
inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a) {
    return splitmix64(seed ^ (0x9E3779B97F4A7C15ULL + splitmix64(a)));
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return hash_combine(hash_combine(seed, a), b);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // standard normal via Box-Muller
    double gauss() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // circular complex Gaussian with E|w|^2 = var
    std::complex<double> cgauss(double var) {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-var * std::log(u1));
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

  private:
    std::uint64_t state_;
};

}  // namespace qmri

#endif
