#pragma once

// Circular unitary ensemble sampling and Monte Carlo estimators: traces of
// powers, the linear statistic, characteristic-function and moment estimates,
// the coefficient-truncation sweep, and the scaled-statistic variance
// experiment with its spectral-density targets.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "szegolab/errors.hpp"
#include "szegolab/quadrature.hpp"
#include "szegolab/rng.hpp"
#include "szegolab/symbol.hpp"

namespace szegolab {

struct cue_sample {
    std::int64_t n = 0;
    std::vector<double> phases;  // each in [-pi, pi)
};

struct mc_estimate {
    cplx mean{0.0, 0.0};
    double std_error = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline double normalize_phase(double t) {
    return t == std::numbers::pi ? -std::numbers::pi : t;
}

} // namespace detail

inline Eigen::MatrixXcd ginibre_matrix(std::int64_t n, counter_rng& rng) {
    Eigen::MatrixXcd g(n, n);
    for (std::int64_t r = 0; r < n; ++r)
        for (std::int64_t c = 0; c < n; ++c) g(r, c) = rng.complex_normal();
    return g;
}

// QR of a Ginibre draw with the column phases fixed so the triangular factor has
// positive diagonal; this makes Q exactly Haar distributed.
inline Eigen::MatrixXcd haar_unitary(std::int64_t n, counter_rng& rng,
                                     const std::string& fingerprint = "") {
    const Eigen::MatrixXcd g = ginibre_matrix(n, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd& rfac = qr.matrixQR();
    for (std::int64_t j = 0; j < n; ++j) {
        const cplx d = rfac(j, j);
        const double m = std::abs(d);
        if (!(m > 0.0))
            throw numeric_error(fingerprint, "QR produced a zero diagonal entry");
        q.col(j) *= d / m;
    }
    return q;
}

// Eigenphases of a unitary matrix. Fast path: diagonalize the hermitian part
// C = (U + U*)/2 once, read the skew part S = (U - U*)/(2i) in the same basis,
// and recover each phase as atan2(s_k, c_k). Since U is normal, C and S share
// eigenvectors; a near-degenerate cosine pair mixes them and breaks the circle
// relation c^2 + s^2 = 1, which the guard detects before falling back to a
// general eigensolver on U itself.
inline std::vector<double> unitary_eigenphases(const Eigen::MatrixXcd& u,
                                               const std::string& fingerprint = "") {
    const std::int64_t n = u.rows();
    if (n < 1 || u.cols() != n)
        throw validation_error("unitary_eigenphases", "matrix must be square and nonempty");

    Eigen::MatrixXcd v = 0.5 * (u + u.adjoint());
    Eigen::VectorXd c(n);
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L',
                                           static_cast<lapack_int>(n), v.data(),
                                           static_cast<lapack_int>(n), c.data());
    bool ok = info == 0;
    std::vector<double> phases(static_cast<std::size_t>(n));
    if (ok) {
        const Eigen::MatrixXcd s = (u - u.adjoint()) * cplx(0.0, -0.5);
        const Eigen::MatrixXcd sv = s * v;
        for (std::int64_t k = 0; k < n && ok; ++k) {
            const cplx q = v.col(k).dot(sv.col(k));
            const double sk = q.real();
            if (std::abs(q.imag()) > 1e-8 || std::abs(c[k] * c[k] + sk * sk - 1.0) > 1e-8)
                ok = false;  // mixed eigenvectors: defer to the general solver
            else
                phases[static_cast<std::size_t>(k)] =
                    detail::normalize_phase(std::atan2(sk, c[k]));
        }
        if (ok) return phases;
    }

    Eigen::MatrixXcd a = u;
    Eigen::VectorXcd w(n);
    const lapack_int ginfo =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(n), a.data(),
                      static_cast<lapack_int>(n), w.data(), nullptr, 1, nullptr, 1);
    if (ginfo != 0)
        throw numeric_error(fingerprint, "eigenvalue solver failed (zgeev info=" +
                                             std::to_string(ginfo) + ")");
    for (std::int64_t k = 0; k < n; ++k) {
        if (std::abs(std::abs(w[k]) - 1.0) > 1e-8)
            throw numeric_error(fingerprint, "eigenvalue off the unit circle: |lambda|=" +
                                                 std::to_string(std::abs(w[k])));
        phases[static_cast<std::size_t>(k)] =
            detail::normalize_phase(std::atan2(w[k].imag(), w[k].real()));
    }
    return phases;
}

inline cue_sample sample_cue(std::int64_t n, std::uint64_t stream) {
    if (n < 1) throw validation_error("n", "sample_cue: n must be >= 1");
    char buf[64];
    std::snprintf(buf, sizeof buf, "cue n=%lld stream=%016llx", static_cast<long long>(n),
                  static_cast<unsigned long long>(stream));
    counter_rng rng(stream);
    cue_sample s;
    s.n = n;
    s.phases = unitary_eigenphases(haar_unitary(n, rng, buf), buf);
    return s;
}

inline std::vector<cplx> trace_powers(const cue_sample& s, const std::vector<std::int64_t>& ks) {
    std::vector<cplx> out;
    out.reserve(ks.size());
    for (const std::int64_t k : ks) {
        cplx acc{0.0, 0.0};
        for (const double th : s.phases) {
            const double a = static_cast<double>(k) * th;
            acc += cplx(std::cos(a), std::sin(a));
        }
        out.push_back(acc);
    }
    return out;
}

// X_n = sum_{|j|>0} alpha_j / sqrt(min(k_j, n)) Tr U^{k_j}; real up to rounding
// for hermitian specs.
inline cplx linear_statistic(const symbol_spec& spec, std::int64_t n, const cue_sample& s) {
    const auto freqs = spec.frequencies(n);
    cplx x{0.0, 0.0};
    for (const auto& [j, k] : freqs) {
        const double w = 1.0 / std::sqrt(static_cast<double>(std::min<std::int64_t>(k, n)));
        const cplx t = trace_powers(s, {k})[0];
        x += w * (spec.alpha(j) * t + spec.alpha(-j) * std::conj(t));
    }
    return x;
}

namespace detail {

// Fixed-size chunks accumulated independently and folded in chunk order: the
// arithmetic is identical for any thread count, so reports stay byte-stable.
constexpr std::int64_t mc_chunk = 32;

template <typename Acc>
void chunked_mc(std::int64_t samples, int threads,
                const std::function<void(Acc&, std::int64_t)>& item,
                const std::function<void(const Acc&)>& fold) {
    const std::int64_t nchunks = (samples + mc_chunk - 1) / mc_chunk;
    if (threads <= 1) {
        for (std::int64_t c = 0; c < nchunks; ++c) {
            Acc acc{};
            const std::int64_t hi = std::min(samples, (c + 1) * mc_chunk);
            for (std::int64_t i = c * mc_chunk; i < hi; ++i) item(acc, i);
            fold(acc);
        }
        return;
    }
    std::vector<Acc> slots(static_cast<std::size_t>(nchunks));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    const int tn = static_cast<int>(std::min<std::int64_t>(threads, nchunks));
    for (int t = 0; t < tn; ++t)
        pool.emplace_back([&] {
            try {
                for (std::int64_t c; (c = next.fetch_add(1)) < nchunks;) {
                    Acc acc{};
                    const std::int64_t hi = std::min(samples, (c + 1) * mc_chunk);
                    for (std::int64_t i = c * mc_chunk; i < hi; ++i) item(acc, i);
                    slots[static_cast<std::size_t>(c)] = std::move(acc);
                }
            } catch (...) {
                const std::lock_guard<std::mutex> g(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    for (const auto& acc : slots) fold(acc);
}

inline mc_estimate finish_estimate(cplx sum, double sumsq, std::int64_t samples,
                                   std::uint64_t seed) {
    mc_estimate e;
    e.samples = samples;
    e.seed = seed;
    e.mean = sum / static_cast<double>(samples);
    const double var = std::max(
        0.0, (sumsq - static_cast<double>(samples) * std::norm(e.mean)) /
                 static_cast<double>(samples - 1));
    e.std_error = std::sqrt(var / static_cast<double>(samples));
    return e;
}

} // namespace detail

inline mc_estimate char_fn_mc(const symbol_spec& spec, std::int64_t n, std::int64_t samples,
                              std::uint64_t seed, int threads = 1) {
    if (samples < 100)
        throw validation_error("mc.samples", "char_fn_mc needs at least 100 samples");
    spec.frequencies(n);  // validate the schedule up front
    struct acc {
        cplx sum{0.0, 0.0};
        double sq = 0.0;
    };
    cplx sum{0.0, 0.0};
    double sq = 0.0;
    detail::chunked_mc<acc>(
        samples, threads,
        [&](acc& a, std::int64_t i) {
            const cue_sample s = sample_cue(
                n, derive_stream(seed, static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(i)));
            const cplx z = std::exp(cplx(0.0, 1.0) * linear_statistic(spec, n, s));
            a.sum += z;
            a.sq += std::norm(z);
        },
        [&](const acc& a) {
            sum += a.sum;
            sq += a.sq;
        });
    return detail::finish_estimate(sum, sq, samples, seed);
}

struct moment_row {
    std::string quantity;  // trace_pair | re_sq | im_sq | re_im_cov
    std::int64_t k = 0;
    std::int64_t l = 0;
    cplx value{0.0, 0.0};
    double std_error = 0.0;
    cplx target{0.0, 0.0};
    bool holds = false;  // |value - target| <= 3 std_error
};

// E[Tr U^k conj(Tr U^l)] = delta_{kl} min(k,n); Re and Im parts each carry half
// the variance and are uncorrelated.
inline std::vector<moment_row> moment_suite(std::int64_t n, const std::vector<std::int64_t>& ks,
                                            std::int64_t samples, std::uint64_t seed,
                                            int threads = 1) {
    if (n < 1) throw validation_error("n", "moment_suite: n must be >= 1");
    if (samples < 2) throw validation_error("mc.samples", "moment_suite needs >= 2 samples");
    if (ks.empty()) throw validation_error("ks", "moment_suite needs at least one power");
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1)
            throw validation_error("ks", "powers must be positive integers");
        for (std::size_t j = i + 1; j < ks.size(); ++j)
            if (ks[i] == ks[j]) throw validation_error("ks", "powers must be mutually distinct");
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < ks.size(); ++a)
        for (std::size_t b = a; b < ks.size(); ++b) pairs.emplace_back(a, b);
    const std::size_t np = pairs.size(), nk = ks.size();

    struct acc {
        std::vector<cplx> pair_sum;
        std::vector<double> pair_sq;
        std::vector<double> part_sum;  // 3 per k: re^2, im^2, re*im
        std::vector<double> part_sq;
    };
    acc total;
    total.pair_sum.assign(np, cplx(0.0, 0.0));
    total.pair_sq.assign(np, 0.0);
    total.part_sum.assign(3 * nk, 0.0);
    total.part_sq.assign(3 * nk, 0.0);

    detail::chunked_mc<acc>(
        samples, threads,
        [&](acc& a, std::int64_t i) {
            if (a.pair_sum.empty()) {
                a.pair_sum.assign(np, cplx(0.0, 0.0));
                a.pair_sq.assign(np, 0.0);
                a.part_sum.assign(3 * nk, 0.0);
                a.part_sq.assign(3 * nk, 0.0);
            }
            const cue_sample s = sample_cue(
                n, derive_stream(seed, static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(i)));
            const std::vector<cplx> t = trace_powers(s, ks);
            for (std::size_t p = 0; p < np; ++p) {
                const cplx w = t[pairs[p].first] * std::conj(t[pairs[p].second]);
                a.pair_sum[p] += w;
                a.pair_sq[p] += std::norm(w);
            }
            for (std::size_t q = 0; q < nk; ++q) {
                const double re = t[q].real(), im = t[q].imag();
                const double vals[3] = {re * re, im * im, re * im};
                for (int c = 0; c < 3; ++c) {
                    a.part_sum[3 * q + c] += vals[c];
                    a.part_sq[3 * q + c] += vals[c] * vals[c];
                }
            }
        },
        [&](const acc& a) {
            for (std::size_t p = 0; p < np; ++p) {
                total.pair_sum[p] += a.pair_sum[p];
                total.pair_sq[p] += a.pair_sq[p];
            }
            for (std::size_t q = 0; q < 3 * nk; ++q) {
                total.part_sum[q] += a.part_sum[q];
                total.part_sq[q] += a.part_sq[q];
            }
        });

    std::vector<moment_row> rows;
    const auto push = [&](std::string quantity, std::int64_t k, std::int64_t l, cplx sum,
                          double sq, cplx target) {
        const mc_estimate e = detail::finish_estimate(sum, sq, samples, seed);
        moment_row r;
        r.quantity = std::move(quantity);
        r.k = k;
        r.l = l;
        r.value = e.mean;
        r.std_error = e.std_error;
        r.target = target;
        r.holds = std::abs(r.value - r.target) <= 3.0 * r.std_error;
        rows.push_back(std::move(r));
    };
    for (std::size_t p = 0; p < np; ++p) {
        const std::int64_t ka = ks[pairs[p].first], kb = ks[pairs[p].second];
        const double tgt =
            ka == kb ? static_cast<double>(std::min<std::int64_t>(ka, n)) : 0.0;
        push("trace_pair", ka, kb, total.pair_sum[p], total.pair_sq[p], cplx(tgt, 0.0));
    }
    for (std::size_t q = 0; q < nk; ++q) {
        const double half = 0.5 * static_cast<double>(std::min<std::int64_t>(ks[q], n));
        const char* names[3] = {"re_sq", "im_sq", "re_im_cov"};
        const double tgts[3] = {half, half, 0.0};
        for (int c = 0; c < 3; ++c)
            push(names[c], ks[q], ks[q], cplx(total.part_sum[3 * q + c], 0.0),
                 total.part_sq[3 * q + c], cplx(tgts[c], 0.0));
    }
    return rows;
}

struct truncation_row {
    std::int64_t m = 0;
    double diff = 0.0;       // |E e^{iX_n} - E e^{iX_{n,m}}|, common random numbers
    double bound = 0.0;      // (sum_{|j|>m} |alpha_j|^2)^{1/2}
    double std_error = 0.0;  // of the paired difference
    bool holds = false;      // diff <= bound + 3 std_error
};

// Drops coefficients with |j| > m from the statistic and compares characteristic
// functions on the same draws; the tail-mass bound must dominate each gap.
inline std::vector<truncation_row> truncation_sweep(const symbol_spec& spec, std::int64_t n,
                                                    const std::vector<std::int64_t>& m_list,
                                                    std::int64_t samples, std::uint64_t seed,
                                                    int threads = 1) {
    if (!spec.hermitian)
        throw validation_error("spec.hermitian",
                               "truncation_sweep requires a hermitian spec: the splitting "
                               "argument needs a real-valued statistic");
    if (samples < 100)
        throw validation_error("mc.samples", "truncation_sweep needs at least 100 samples");
    if (m_list.empty()) throw validation_error("m_values", "truncation_sweep needs cut points");

    std::vector<int> js = spec.positive_js();
    std::sort(js.begin(), js.end());
    const auto freqs = spec.frequencies(n);
    std::vector<std::int64_t> ks;
    ks.reserve(js.size());
    for (const int j : js) ks.push_back(freqs.at(j));

    struct acc {
        std::vector<cplx> dsum;
        std::vector<double> dsq;
    };
    acc total;
    total.dsum.assign(m_list.size(), cplx(0.0, 0.0));
    total.dsq.assign(m_list.size(), 0.0);

    detail::chunked_mc<acc>(
        samples, threads,
        [&](acc& a, std::int64_t i) {
            if (a.dsum.empty()) {
                a.dsum.assign(m_list.size(), cplx(0.0, 0.0));
                a.dsq.assign(m_list.size(), 0.0);
            }
            const cue_sample s = sample_cue(
                n, derive_stream(seed, static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(i)));
            const std::vector<cplx> t = trace_powers(s, ks);
            std::vector<cplx> contrib(js.size());
            cplx full{0.0, 0.0};
            for (std::size_t q = 0; q < js.size(); ++q) {
                const double w =
                    1.0 / std::sqrt(static_cast<double>(std::min<std::int64_t>(ks[q], n)));
                contrib[q] =
                    w * (spec.alpha(js[q]) * t[q] + spec.alpha(-js[q]) * std::conj(t[q]));
                full += contrib[q];
            }
            const cplx z = std::exp(cplx(0.0, 1.0) * full);
            for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
                cplx part{0.0, 0.0};
                for (std::size_t q = 0; q < js.size(); ++q)
                    if (js[q] <= m_list[mi]) part += contrib[q];
                const cplx d = z - std::exp(cplx(0.0, 1.0) * part);
                a.dsum[mi] += d;
                a.dsq[mi] += std::norm(d);
            }
        },
        [&](const acc& a) {
            for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
                total.dsum[mi] += a.dsum[mi];
                total.dsq[mi] += a.dsq[mi];
            }
        });

    std::vector<truncation_row> rows;
    for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
        double tail = 0.0;
        for (const int j : js)
            if (j > m_list[mi])
                tail += std::norm(spec.alpha(j)) + std::norm(spec.alpha(-j));
        const mc_estimate e =
            detail::finish_estimate(total.dsum[mi], total.dsq[mi], samples, seed);
        truncation_row r;
        r.m = m_list[mi];
        r.diff = std::abs(e.mean);
        r.bound = std::sqrt(tail);
        r.std_error = e.std_error;
        r.holds = r.diff <= r.bound + 3.0 * r.std_error;
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Scaled statistics X_n = sum_mu f(n^gamma theta_mu)
// ---------------------------------------------------------------------------

struct scaled_stat {
    enum class family_kind { bump_derivative, bandlimited };
    family_kind family = family_kind::bump_derivative;
    double scale = std::numbers::pi;  // bump support half-width s in (0, pi]
    double gamma = 0.5;               // in (0, 1]
    // bandlimited: piecewise-linear transform knots on y >= 0, hermitian extension
    // implied; first and last values must vanish so f-hat is continuous and f-hat(0)=0.
    std::vector<std::pair<double, cplx>> fhat_table;

    void validate() const {
        if (!(gamma > 0.0) || gamma > 1.0)
            throw validation_error("stat.gamma", "gamma must lie in (0, 1]");
        if (family == family_kind::bump_derivative) {
            if (!(scale > 0.0) || scale > std::numbers::pi)
                throw validation_error("stat.scale", "bump support half-width must lie in (0, pi]");
            return;
        }
        if (fhat_table.size() < 2)
            throw validation_error("stat.fhat_table", "need at least two transform knots");
        if (fhat_table.front().first < 0.0)
            throw validation_error("stat.fhat_table", "knots must lie on y >= 0");
        for (std::size_t i = 0; i + 1 < fhat_table.size(); ++i)
            if (!(fhat_table[i].first < fhat_table[i + 1].first))
                throw validation_error("stat.fhat_table", "knots must be strictly increasing");
        if (std::abs(fhat_table.front().second) != 0.0 ||
            std::abs(fhat_table.back().second) != 0.0)
            throw validation_error("stat.fhat_table",
                                   "first and last knot values must be zero (f-hat(0)=0 and "
                                   "compact support)");
        for (const auto& [y, v] : fhat_table)
            if (!std::isfinite(y) || !finite(v))
                throw validation_error("stat.fhat_table", "knots must be finite");
    }
};

namespace detail {

// d/dx exp(-1/(1-(x/s)^2)) on |x| < s, zero outside. The exponential underflows
// to zero long before the rational prefactor can overflow, so the product is safe.
inline double bump_derivative_eval(double x, double s) {
    const double u = x / s;
    const double d = 1.0 - u * u;
    if (!(d > 0.0)) return 0.0;
    return std::exp(-1.0 / d) * (-2.0 * u / (d * d)) / s;
}

// integral_0^h (v0 + dv t/h) e^{ixt} dt, stable for small x h
inline cplx linear_segment_transform(double h, cplx v0, cplx dv, double x) {
    const double xh = x * h;
    if (std::abs(xh) < 1e-4) {
        const cplx i1 = h * cplx(1.0 - xh * xh / 6.0, xh / 2.0 - xh * xh * xh / 24.0);
        const cplx i2 =
            h * h * cplx(0.5 - xh * xh / 8.0, xh / 3.0 - xh * xh * xh / 30.0);
        return v0 * i1 + (dv / h) * i2;
    }
    const cplx ix(0.0, x);
    const cplx e = std::exp(ix * h);
    const cplx i1 = (e - 1.0) / ix;
    const cplx i2 = (h * e) / ix - i1 / ix;
    return v0 * i1 + (dv / h) * i2;
}

} // namespace detail

// f(x), pointwise. Bandlimited: f(x) = (1/pi) Re integral_0^ymax fhat(y) e^{ixy} dy
// with the piecewise-linear transform integrated segment by segment in closed form.
inline double stat_eval(const scaled_stat& st, double x) {
    if (st.family == scaled_stat::family_kind::bump_derivative)
        return detail::bump_derivative_eval(x, st.scale);
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < st.fhat_table.size(); ++i) {
        const double y0 = st.fhat_table[i].first;
        const double h = st.fhat_table[i + 1].first - y0;
        const cplx v0 = st.fhat_table[i].second;
        const cplx dv = st.fhat_table[i + 1].second - v0;
        acc += std::exp(cplx(0.0, x * y0)) * detail::linear_segment_transform(h, v0, dv, x);
    }
    return acc.real() / std::numbers::pi;
}

// f-hat(y) = integral f(x) e^{-ixy} dx for y >= 0. For the bump family this is
// i y w-hat(y) by parts, with w-hat evaluated by composite quadrature sized to
// the oscillation; the bandlimited family interpolates its own table.
inline cplx stat_fhat(const scaled_stat& st, double y) {
    if (st.family == scaled_stat::family_kind::bandlimited) {
        if (y < st.fhat_table.front().first || y > st.fhat_table.back().first)
            return cplx(0.0, 0.0);
        for (std::size_t i = 0; i + 1 < st.fhat_table.size(); ++i) {
            const double y0 = st.fhat_table[i].first, y1 = st.fhat_table[i + 1].first;
            if (y <= y1) {
                const double t = (y - y0) / (y1 - y0);
                return st.fhat_table[i].second * (1.0 - t) + st.fhat_table[i + 1].second * t;
            }
        }
        return cplx(0.0, 0.0);
    }
    const double s = st.scale;
    const int panels = 4 + static_cast<int>(std::ceil(s * std::abs(y) / 8.0));
    const double what = composite_gl(
        [&](double x) {
            const double u = x / s;
            const double d = 1.0 - u * u;
            return d > 0.0 ? 2.0 * std::exp(-1.0 / d) * std::cos(x * y) : 0.0;
        },
        0.0, s, panels, gl32());
    return cplx(0.0, y * what);
}

namespace detail {

inline double sigma2_integral(const scaled_stat& st, bool mock, double rel_tol) {
    const auto weight = [mock](double y) { return mock ? std::min(y, 1.0) : y; };
    const auto integrand = [&](double y) { return weight(y) * std::norm(stat_fhat(st, y)); };
    const double scale = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);

    if (st.family == scaled_stat::family_kind::bandlimited) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < st.fhat_table.size(); ++i) {
            double a = st.fhat_table[i].first, b = st.fhat_table[i + 1].first;
            if (mock && a < 1.0 && b > 1.0) {  // split the kink of min(y, 1)
                total += adaptive_integrate(integrand, a, 1.0, rel_tol, "sigma2");
                a = 1.0;
            }
            total += adaptive_integrate(integrand, a, b, rel_tol, "sigma2");
        }
        return scale * total;
    }

    // Smooth compactly supported f: the transform decays faster than any power,
    // so octave contributions eventually collapse; two consecutive negligible
    // octaves certify the tail. Far octaves sit at the rounding-noise floor of
    // the transform quadrature, so refinement there stops at a floor tied to
    // the mass already accumulated.
    double total = adaptive_integrate(integrand, 0.0, 1.0, rel_tol, "sigma2");
    double lo = 1.0;
    int quiet = 0;
    while (quiet < 2) {
        const double hi = 2.0 * lo;
        const double part =
            adaptive_integrate(integrand, lo, hi, rel_tol, "sigma2", 0.05 * rel_tol * total);
        total += part;
        quiet = part <= 0.05 * rel_tol * total ? quiet + 1 : 0;
        lo = hi;
        if (lo > 16777216.0)
            throw numeric_error("quadrature sigma2",
                                "transform tail failed to decay; integral did not converge");
    }
    return scale * total;
}

} // namespace detail

inline double sigma2_soshnikov(const scaled_stat& st, double rel_tol = 1e-8) {
    return detail::sigma2_integral(st, false, rel_tol);
}

inline double sigma2_mock(const scaled_stat& st, double rel_tol = 1e-8) {
    return detail::sigma2_integral(st, true, rel_tol);
}

// Finite-n variance under the ensemble, exact up to quadrature of the transform:
// Var X_n = 2 sum_{k>=1} min(k,n) |fhat(k / n^gamma)|^2 / (2 pi n^gamma)^2.
inline double exact_cue_variance(const scaled_stat& st, std::int64_t n) {
    const double ng = std::pow(static_cast<double>(n), st.gamma);
    const double denom = 2.0 * std::numbers::pi * ng;
    const double ymax = st.family == scaled_stat::family_kind::bandlimited
                            ? st.fhat_table.back().first
                            : -1.0;
    double acc = 0.0;
    int quiet = 0;
    for (std::int64_t k = 1;; ++k) {
        const double y = static_cast<double>(k) / ng;
        if (ymax >= 0.0 && y > ymax) break;
        const double term = static_cast<double>(std::min<std::int64_t>(k, n)) *
                            std::norm(stat_fhat(st, y));
        acc += term;
        if (ymax < 0.0) {
            quiet = (y > 4.0 && term <= 1e-16 * acc) ? quiet + 1 : 0;
            if (quiet >= 3) break;
            if (k > 10000000)
                throw numeric_error("exact_cue_variance", "term sum failed to converge");
        }
    }
    return 2.0 * acc / (denom * denom);
}

struct mock_gaussian_result {
    mc_estimate empirical_mean;
    mc_estimate empirical_var;  // mean field carries the variance estimate
    double sigma2_soshnikov = 0.0;
    double sigma2_mock = 0.0;
    double exact_cue_var = 0.0;
};

inline mock_gaussian_result mock_gaussian_experiment(const scaled_stat& st, std::int64_t n,
                                                     std::int64_t samples, std::uint64_t seed,
                                                     int threads = 1) {
    st.validate();
    if (n < 1) throw validation_error("n", "mock_gaussian_experiment: n must be >= 1");
    if (samples < 100)
        throw validation_error("mc.samples", "mock_gaussian_experiment needs >= 100 samples");
    const double ng = std::pow(static_cast<double>(n), st.gamma);

    struct acc {
        double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    };
    acc total;
    detail::chunked_mc<acc>(
        samples, threads,
        [&](acc& a, std::int64_t i) {
            const cue_sample s = sample_cue(
                n, derive_stream(seed, static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(i)));
            double x = 0.0;
            for (const double th : s.phases) x += stat_eval(st, ng * th);
            const double x2 = x * x;
            a.s1 += x;
            a.s2 += x2;
            a.s3 += x2 * x;
            a.s4 += x2 * x2;
        },
        [&](const acc& a) {
            total.s1 += a.s1;
            total.s2 += a.s2;
            total.s3 += a.s3;
            total.s4 += a.s4;
        });

    const double S = static_cast<double>(samples);
    const double mean = total.s1 / S;
    const double var = std::max(0.0, (total.s2 - S * mean * mean) / (S - 1.0));
    const double m2 = var * (S - 1.0) / S;
    const double m4 = total.s4 / S - 4.0 * mean * total.s3 / S +
                      6.0 * mean * mean * total.s2 / S - 3.0 * mean * mean * mean * mean;
    const double se_var =
        std::sqrt(std::max(0.0, (m4 - (S - 3.0) / (S - 1.0) * m2 * m2) / S));

    mock_gaussian_result r;
    r.empirical_mean = {cplx(mean, 0.0), std::sqrt(var / S), samples, seed};
    r.empirical_var = {cplx(var, 0.0), se_var, samples, seed};
    r.sigma2_soshnikov = sigma2_soshnikov(st);
    r.sigma2_mock = sigma2_mock(st);
    r.exact_cue_var = exact_cue_variance(st, n);
    return r;
}

} // namespace szegolab
