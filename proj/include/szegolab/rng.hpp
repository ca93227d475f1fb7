#pragma once

// Counter-based random streams. Each Monte Carlo draw owns a stream keyed by
// (master seed, n, sample index), so serial and parallel runs see identical
// numbers and any single draw can be replayed in isolation.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace szegolab {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Stream key for draw `index` of an experiment at size `n`.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t n, std::uint64_t index) {
    std::uint64_t h = detail::mix64(master + 0x9e3779b97f4a7c15ULL);
    h = detail::mix64(h ^ (n * 0xd1b54a32d192ed03ULL));
    h = detail::mix64(h ^ (index * 0x8cb92ba72f3d8dd7ULL));
    return h;
}

struct counter_rng {
    std::uint64_t state;

    explicit counter_rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        return detail::mix64(z);
    }

    // uniform on (0, 1]: never zero, safe under log
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform01()));
        const double t = 2.0 * std::numbers::pi * uniform01();
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    // standard complex Gaussian, E|z|^2 = 1
    std::complex<double> complex_normal() {
        const double re = normal();
        const double im = normal();
        return std::complex<double>(re, im) * std::numbers::sqrt2 * 0.5;
    }

private:
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace szegolab
