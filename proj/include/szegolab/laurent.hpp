#pragma once

// Sparse Laurent series on the unit circle: c(z) = sum_k c_k z^k with integer
// frequencies, held as an ordered map. tail_bound is a certified upper bound on
// the l1 mass of whatever the stored window omits (0 for exactly known series).

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "szegolab/errors.hpp"

namespace szegolab {

using cplx = std::complex<double>;

inline bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

struct laurent_series {
    std::map<std::int64_t, cplx> coeffs;
    double tail_bound = 0.0;

    laurent_series() = default;

    explicit laurent_series(std::map<std::int64_t, cplx> c, double tail = 0.0)
        : coeffs(std::move(c)), tail_bound(tail) {
        validate();
    }

    void validate() const {
        if (!(tail_bound >= 0.0) || !std::isfinite(tail_bound))
            throw validation_error("laurent_series.tail_bound", "must be finite and >= 0");
        for (const auto& [k, v] : coeffs)
            if (!finite(v))
                throw validation_error("laurent_series.coeffs[" + std::to_string(k) + "]",
                                       "coefficient must be finite");
    }

    cplx coeff(std::int64_t k) const {
        auto it = coeffs.find(k);
        return it == coeffs.end() ? cplx(0.0, 0.0) : it->second;
    }

    void set(std::int64_t k, cplx v) {
        if (!finite(v))
            throw validation_error("laurent_series.coeffs[" + std::to_string(k) + "]",
                                   "coefficient must be finite");
        if (v == cplx(0.0, 0.0))
            coeffs.erase(k);
        else
            coeffs[k] = v;
    }

    void add_to(std::int64_t k, cplx v) { set(k, coeff(k) + v); }

    bool empty() const { return coeffs.empty(); }

    std::int64_t min_freq() const { return coeffs.empty() ? 0 : coeffs.begin()->first; }
    std::int64_t max_freq() const { return coeffs.empty() ? 0 : coeffs.rbegin()->first; }

    // largest |frequency| carrying a stored coefficient
    std::int64_t bandwidth() const {
        if (coeffs.empty()) return 0;
        return std::max(std::llabs(min_freq()), std::llabs(max_freq()));
    }

    double wiener_stored() const {
        double s = 0.0;
        for (const auto& [k, v] : coeffs) s += std::abs(v);
        return s;
    }

    cplx eval(double theta) const {
        cplx s(0.0, 0.0);
        for (const auto& [k, v] : coeffs) {
            const double a = static_cast<double>(k) * theta;
            s += v * cplx(std::cos(a), std::sin(a));
        }
        return s;
    }
};

inline laurent_series add(const laurent_series& a, const laurent_series& b) {
    laurent_series r = a;
    for (const auto& [k, v] : b.coeffs) r.add_to(k, v);
    r.tail_bound = a.tail_bound + b.tail_bound;
    return r;
}

inline laurent_series scale(const laurent_series& a, cplx s) {
    laurent_series r;
    for (const auto& [k, v] : a.coeffs) r.set(k, s * v);
    r.tail_bound = a.tail_bound * std::abs(s);
    return r;
}

// c(z) -> c(1/z): frequency reversal
inline laurent_series flip(const laurent_series& a) {
    laurent_series r;
    for (const auto& [k, v] : a.coeffs) r.set(-k, v);
    r.tail_bound = a.tail_bound;
    return r;
}

// complex-conjugated coefficients (conj(c)(z) = conj of c on the circle needs flip too;
// this is the plain coefficient-wise conjugate)
inline laurent_series conj_coeffs(const laurent_series& a) {
    laurent_series r;
    for (const auto& [k, v] : a.coeffs) r.set(k, std::conj(v));
    r.tail_bound = a.tail_bound;
    return r;
}

enum class half { plus, minus };

// plus keeps k >= 0 (the constant term rides with the analytic part), minus keeps k < 0.
// Both halves inherit the parent's tail_bound: the omitted mass may lie on either side.
inline laurent_series project_half(const laurent_series& a, half h) {
    laurent_series r;
    for (const auto& [k, v] : a.coeffs)
        if ((h == half::plus && k >= 0) || (h == half::minus && k < 0)) r.set(k, v);
    r.tail_bound = a.tail_bound;
    return r;
}

// Full convolution product, no window clipping.
inline laurent_series multiply(const laurent_series& a, const laurent_series& b) {
    laurent_series r;
    for (const auto& [ka, va] : a.coeffs)
        for (const auto& [kb, vb] : b.coeffs) r.add_to(ka + kb, va * vb);
    r.tail_bound = a.tail_bound * (b.wiener_stored() + b.tail_bound) +
                   b.tail_bound * a.wiener_stored();
    return r;
}

// Convolution clipped to [-K, K]; mass produced outside the window is folded into
// tail_bound so the certificate stays valid.
inline laurent_series multiply_window(const laurent_series& a, const laurent_series& b,
                                      std::int64_t K) {
    if (K < 0) throw validation_error("multiply_window.K", "window must be >= 0");
    laurent_series r;
    double clipped = 0.0;
    for (const auto& [ka, va] : a.coeffs)
        for (const auto& [kb, vb] : b.coeffs) {
            const std::int64_t k = ka + kb;
            const cplx p = va * vb;
            if (std::llabs(k) <= K)
                r.add_to(k, p);
            else
                clipped += std::abs(p);
        }
    r.tail_bound = clipped + a.tail_bound * (b.wiener_stored() + b.tail_bound) +
                   b.tail_bound * a.wiener_stored();
    return r;
}

struct norm_bundle {
    double wiener = 0.0;      // sum |c_k| + tail_bound (upper bound on the Wiener norm)
    double besov_half = 0.0;  // sqrt(sum (1+|k|) |c_k|^2) over stored coefficients
    double l2 = 0.0;          // sqrt(sum |c_k|^2) over stored coefficients
    double sup_estimate = 0.0; // max |c(theta)| on a finite grid: a lower bound for the
                               // true sup norm, never valid as an upper bound
};

inline norm_bundle norms(const laurent_series& a) {
    norm_bundle nb;
    double l2sq = 0.0, bsq = 0.0;
    for (const auto& [k, v] : a.coeffs) {
        const double m = std::abs(v);
        nb.wiener += m;
        l2sq += m * m;
        bsq += (1.0 + static_cast<double>(std::llabs(k))) * m * m;
    }
    nb.wiener += a.tail_bound;
    nb.l2 = std::sqrt(l2sq);
    nb.besov_half = std::sqrt(bsq);
    const std::int64_t bw = a.bandwidth();
    const std::size_t grid = static_cast<std::size_t>(std::max<std::int64_t>(8, 4 * bw));
    for (std::size_t i = 0; i < grid; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) /
                             static_cast<double>(grid);
        nb.sup_estimate = std::max(nb.sup_estimate, std::abs(a.eval(theta)));
    }
    return nb;
}

// c_{-k} = conj(c_k) up to tol, making c real-valued on the circle
inline bool is_hermitian(const laurent_series& a, double tol = 0.0) {
    for (const auto& [k, v] : a.coeffs)
        if (std::abs(v - std::conj(a.coeff(-k))) > tol) return false;
    return true;
}

} // namespace szegolab
