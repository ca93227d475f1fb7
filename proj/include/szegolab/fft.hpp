#pragma once

// In-place iterative radix-2 FFT on power-of-two sizes.
// Only used on unit-circle sample grids, which are powers of two by construction.

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "szegolab/errors.hpp"

namespace szegolab::detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// data[k] <- sum_j data[j] * exp(sign * 2*pi*i * j*k / n), sign = -1 forward.
inline void fft_pow2(std::vector<std::complex<double>>& data, int sign) {
    const std::size_t n = data.size();
    if (!is_pow2(n)) throw validation_error("fft.size", "size must be a power of two");
    if (n == 1) return;

    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

} // namespace szegolab::detail
