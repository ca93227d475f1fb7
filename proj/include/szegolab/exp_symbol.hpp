#pragma once

// Certified exponentiation of a Laurent polynomial g on the unit circle.
//
// e^g is sampled on a power-of-two grid and transformed; the certificate rests on
// the Banach-algebra bound: the l-th term of the exponential series has Wiener mass
// <= G^l / l! (G = wiener(g)) and bandwidth l*B (B = bandwidth(g)), so the l1 mass
// of e^g beyond radius R is at most sum_{l >= ceil(R/B)} G^l / l!. Aliasing on a
// grid of size N folds only frequencies with |k| >= N - K into the window [-K, K],
// so the grid is doubled until that folded mass is below tolerance.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "szegolab/fft.hpp"
#include "szegolab/laurent.hpp"

namespace szegolab {

namespace detail {

// sum_{l >= max(1, ceil(R/B))} G^l / l!, padded by a geometric remainder so the
// truncated summation stays an upper bound.
inline double exp_mass_beyond(double G, std::int64_t B, std::int64_t R) {
    if (B <= 0 || G == 0.0) return 0.0;
    std::int64_t L = (R + B - 1) / B;  // ceil(R/B)
    if (L < 1) L = 1;
    double term = 1.0;  // G^l / l!
    for (std::int64_t l = 1; l <= L; ++l) term *= G / static_cast<double>(l);
    if (term < 1e-300) return 1e-299;  // underflow floor, still far below any usable tol
    double s = term;
    std::int64_t l = L;
    while (term > s * 1e-18 && l < L + 2000) {
        ++l;
        term *= G / static_cast<double>(l);
        s += term;
    }
    const double r = G / static_cast<double>(l + 1);
    if (r >= 1.0) return std::numeric_limits<double>::infinity();
    return s + term * r / (1.0 - r);
}

inline std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t series_key(const laurent_series& g, std::int64_t K, double tol) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& [k, v] : g.coeffs) {
        const double re = v.real(), im = v.imag();
        h = fnv1a(h, &k, sizeof(k));
        h = fnv1a(h, &re, sizeof(re));
        h = fnv1a(h, &im, sizeof(im));
    }
    h = fnv1a(h, &K, sizeof(K));
    h = fnv1a(h, &tol, sizeof(tol));
    return h;
}

inline std::optional<std::string>& cache_dir_ref() {
    static std::optional<std::string> dir;
    return dir;
}

inline std::optional<laurent_series> cache_load(std::uint64_t key) {
    const auto& dir = cache_dir_ref();
    if (!dir) return std::nullopt;
    const std::string path = *dir + "/exp_" + std::to_string(key) + ".txt";
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) return std::nullopt;
    laurent_series r;
    double tail = 0.0;
    if (std::fscanf(f, "tail %lg", &tail) != 1) {
        std::fclose(f);
        return std::nullopt;
    }
    long long k = 0;
    double re = 0.0, im = 0.0;
    while (std::fscanf(f, "%lld %lg %lg", &k, &re, &im) == 3) r.set(k, cplx(re, im));
    std::fclose(f);
    r.tail_bound = tail;
    return r;
}

inline void cache_store(std::uint64_t key, const laurent_series& s) {
    const auto& dir = cache_dir_ref();
    if (!dir) return;
    std::error_code ec;
    std::filesystem::create_directories(*dir, ec);
    const std::string path = *dir + "/exp_" + std::to_string(key) + ".txt";
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "w");
    if (!f) return;
    std::fprintf(f, "tail %.17g\n", s.tail_bound);
    for (const auto& [k, v] : s.coeffs)
        std::fprintf(f, "%lld %.17g %.17g\n", static_cast<long long>(k), v.real(), v.imag());
    std::fclose(f);
    std::filesystem::rename(tmp, path, ec);
}

} // namespace detail

// Optional on-disk memoization of exponentiated symbols (used by the CLI via
// SZEGOLAB_CACHE_DIR). Stored values round-trip bit-exactly, so cached and fresh
// runs produce identical reports.
inline void set_symbol_cache_dir(std::string dir) {
    detail::cache_dir_ref() = std::move(dir);
}
inline void clear_symbol_cache_dir() { detail::cache_dir_ref().reset(); }

// Coefficients of e^g on [-K, K]. tol is relative to e^{wiener(g)}; the returned
// tail_bound (absolute l1 mass outside the stored coefficients) is certified <= that
// scale once, else a truncation_error carries the bound that was achieved.
inline laurent_series exp_symbol(const laurent_series& g, std::int64_t K, double tol = 1e-12,
                                 std::int64_t grid_cap = (std::int64_t{1} << 22)) {
    if (K < 0) throw validation_error("exp_symbol.K", "window must be >= 0");
    if (!(tol > 0.0)) throw validation_error("exp_symbol.tol", "tolerance must be > 0");
    const double G = norms(g).wiener;
    const double scale = std::exp(G);
    const double tol_abs = tol * scale;
    const std::int64_t B = g.bandwidth();

    // mass the input series itself hides outside its stored window
    const double input_tail = (std::exp(g.tail_bound) - 1.0) * scale;

    if (B == 0) {
        laurent_series r;
        r.set(0, std::exp(g.coeff(0)));
        r.tail_bound = input_tail;
        if (r.tail_bound > tol_abs)
            throw truncation_error(r.tail_bound, tol_abs, "exp_symbol: input tail too large");
        return r;
    }

    const std::uint64_t key = detail::series_key(g, K, tol);
    if (auto hit = detail::cache_load(key)) return *hit;

    const double trunc_tail = detail::exp_mass_beyond(G, B, K + 1);
    if (trunc_tail + input_tail > tol_abs)
        throw truncation_error(trunc_tail + input_tail, tol_abs,
                               "exp_symbol: window too small for tolerance");

    std::int64_t N = 8;
    while (N < 8 * (K + B)) N <<= 1;
    double alias_tail = detail::exp_mass_beyond(G, B, N - K);
    while (alias_tail > tol_abs / 2.0 && N < grid_cap) {
        N <<= 1;
        alias_tail = detail::exp_mass_beyond(G, B, N - K);
    }
    if (alias_tail > tol_abs / 2.0)
        throw truncation_error(trunc_tail + alias_tail + input_tail, tol_abs,
                               "exp_symbol: aliasing tolerance unreachable at grid cap");

    std::vector<cplx> grid(static_cast<std::size_t>(N));
    for (std::int64_t i = 0; i < N; ++i) {
        const double theta =
            2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(N);
        grid[static_cast<std::size_t>(i)] = std::exp(g.eval(theta));
    }
    detail::fft_pow2(grid, -1);

    laurent_series r;
    const double prune_eps = tol_abs / (4.0 * static_cast<double>(2 * K + 2));
    double pruned = 0.0;
    for (std::int64_t k = -K; k <= K; ++k) {
        const std::int64_t idx = ((k % N) + N) % N;
        const cplx c = grid[static_cast<std::size_t>(idx)] / static_cast<double>(N);
        if (std::abs(c) <= prune_eps)
            pruned += std::abs(c);
        else
            r.set(k, c);
    }
    r.tail_bound = trunc_tail + alias_tail + pruned + input_tail;
    if (r.tail_bound > tol_abs)
        throw truncation_error(r.tail_bound, tol_abs,
                               "exp_symbol: requested window cannot certify tolerance");
    detail::cache_store(key, r);
    return r;
}

// Doubles the window until the certificate fits, so callers only state a lower
// bound for the coefficients they need.
inline laurent_series exp_symbol_auto(const laurent_series& g, std::int64_t K_min,
                                      double tol = 1e-12) {
    std::int64_t K = std::max<std::int64_t>({K_min, 2 * g.bandwidth(), 8});
    const std::int64_t K_cap = std::int64_t{1} << 21;
    for (;;) {
        try {
            return exp_symbol(g, K, tol);
        } catch (const truncation_error&) {
            if (K >= K_cap) throw;
            K *= 2;
        }
    }
}

struct phi_psi_pair {
    laurent_series phi;  // exp(-g1_plus) * exp(g1_minus)
    laurent_series psi;  // flip(exp(g1_plus)) * flip(exp(-g1_minus))
};

// Both factors are exponentiated with certified tails and multiplied by windowed
// convolution; clipped mass rides along in the tail bounds.
inline phi_psi_pair phi_psi(const laurent_series& g1, std::int64_t K, double tol = 1e-12) {
    const laurent_series gp = project_half(g1, half::plus);
    const laurent_series gm = project_half(g1, half::minus);
    const laurent_series ep_inv = exp_symbol_auto(scale(gp, cplx(-1.0, 0.0)), K, tol);
    const laurent_series em = exp_symbol_auto(gm, K, tol);
    const laurent_series ep = exp_symbol_auto(gp, K, tol);
    const laurent_series em_inv = exp_symbol_auto(scale(gm, cplx(-1.0, 0.0)), K, tol);
    phi_psi_pair r;
    r.phi = multiply_window(ep_inv, em, K);
    r.psi = multiply_window(flip(ep), flip(em_inv), K);
    return r;
}

// For t(z) = sum_{0<j<=N} t_j z^j (weights already included in t_j), the coefficient
// of e^t at N + k obeys |(e^t)_{N+k}| < (F_t (e^{F_t} - 1))_{N+k} / sqrt(k (N+k))
// where F_t(z) = sum |t_j| sqrt(j) z^j. Returns that bound.
inline double majorant_coeff_bound(const laurent_series& t, std::int64_t k) {
    if (t.empty()) throw validation_error("majorant.t", "series must be nonempty");
    if (t.min_freq() < 1)
        throw validation_error("majorant.t", "support must lie in positive frequencies");
    if (k < 1) throw validation_error("majorant.k", "offset must be >= 1");
    const std::int64_t N = t.max_freq();

    laurent_series F;
    for (const auto& [j, v] : t.coeffs)
        F.set(j, cplx(std::abs(v) * std::sqrt(static_cast<double>(j)), 0.0));

    const laurent_series E = exp_symbol_auto(F, N + k, 1e-14);
    // (F * (E - 1))_{N+k}; E's constant term is the only one the -1 touches, and the
    // convolution never reaches it because F has no constant term.
    double s = 0.0;
    for (const auto& [j, v] : F.coeffs) {
        const std::int64_t m = N + k - j;
        if (m == 0) continue;
        s += v.real() * std::abs(E.coeff(m));
    }
    // E's certified tail keeps this an upper bound even for pruned coefficients
    s += norms(F).wiener * E.tail_bound;
    return s / std::sqrt(static_cast<double>(k) * static_cast<double>(N + k));
}

} // namespace szegolab
