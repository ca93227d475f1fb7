#pragma once

// Symbol specifications: coefficient pairs alpha_j with an n-dependent frequency
// schedule k_j(n). Index j runs over nonzero integers with k_{-j}(n) = -k_j(n);
// a hermitian spec implies alpha_{-j} = conj(alpha_j) and produces a real-valued
// symbol on the circle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "szegolab/errors.hpp"
#include "szegolab/laurent.hpp"

namespace szegolab {

struct schedule_term {
    double c = 0.0;     // k_j(n) = floor(c * n) + d
    std::int64_t d = 0;
};

struct symbol_schedule {
    enum class kind { fixed, affine, table };
    kind type = kind::fixed;

    std::map<int, std::int64_t> fixed;                       // j (> 0) -> k_j
    std::map<int, schedule_term> affine;                     // j (> 0) -> (c, d)
    std::map<std::int64_t, std::map<int, std::int64_t>> table; // n -> (j -> k_j(n))

    std::int64_t k_of(int j, std::int64_t n) const {
        if (j <= 0) throw validation_error("schedule.j", "schedule is indexed by j >= 1");
        switch (type) {
            case kind::fixed: {
                auto it = fixed.find(j);
                if (it == fixed.end())
                    throw validation_error("schedule.fixed", "no rule for j=" + std::to_string(j));
                return it->second;
            }
            case kind::affine: {
                auto it = affine.find(j);
                if (it == affine.end())
                    throw validation_error("schedule.affine", "no rule for j=" + std::to_string(j));
                return static_cast<std::int64_t>(std::floor(it->second.c * static_cast<double>(n))) +
                       it->second.d;
            }
            case kind::table: {
                auto nt = table.find(n);
                if (nt == table.end())
                    throw validation_error("schedule.table",
                                           "no entry for n=" + std::to_string(n));
                auto it = nt->second.find(j);
                if (it == nt->second.end())
                    throw validation_error("schedule.table", "no rule for j=" + std::to_string(j) +
                                                                 " at n=" + std::to_string(n));
                return it->second;
            }
        }
        throw validation_error("schedule.type", "unknown schedule kind");
    }
};

struct symbol_spec {
    std::map<int, cplx> alphas;  // j != 0; for hermitian specs negative j may be omitted
    symbol_schedule schedule;
    bool hermitian = true;

    std::vector<int> positive_js() const {
        std::vector<int> js;
        for (const auto& [j, a] : alphas)
            if (j > 0) js.push_back(j);
        // a hermitian spec may list only negative indices; reflect them
        for (const auto& [j, a] : alphas)
            if (j < 0 && alphas.find(-j) == alphas.end()) js.push_back(-j);
        std::sort(js.begin(), js.end());
        return js;
    }

    cplx alpha(int j) const {
        auto it = alphas.find(j);
        if (it != alphas.end()) return it->second;
        if (hermitian) {
            auto m = alphas.find(-j);
            if (m != alphas.end()) return std::conj(m->second);
        }
        return cplx(0.0, 0.0);
    }

    double a1() const {  // sum over all nonzero j of |alpha_j|
        double s = 0.0;
        for (int j : positive_js()) s += std::abs(alpha(j)) + std::abs(alpha(-j));
        return s;
    }

    double a2() const {  // sqrt of sum over all nonzero j of |alpha_j|^2
        double s = 0.0;
        for (int j : positive_js()) s += std::norm(alpha(j)) + std::norm(alpha(-j));
        return std::sqrt(s);
    }

    void validate() const {
        if (alphas.count(0))
            throw validation_error("spec.alphas", "index j=0 is not allowed");
        for (const auto& [j, a] : alphas)
            if (!finite(a))
                throw validation_error("spec.alphas[" + std::to_string(j) + "]",
                                       "coefficient must be finite");
        if (hermitian) {
            for (const auto& [j, a] : alphas) {
                auto m = alphas.find(-j);
                if (m != alphas.end() && std::abs(m->second - std::conj(a)) != 0.0)
                    throw validation_error("spec.alphas[" + std::to_string(-j) + "]",
                                           "hermitian spec requires alpha_{-j} = conj(alpha_j)");
            }
        }
    }

    // Frequencies for one n: k_j(n) must be mutually distinct positive integers.
    std::map<int, std::int64_t> frequencies(std::int64_t n) const {
        if (n < 1) throw validation_error("spec.n", "matrix size must be >= 1");
        validate();
        std::map<int, std::int64_t> ks;
        std::map<std::int64_t, int> seen;
        for (int j : positive_js()) {
            const std::int64_t k = schedule.k_of(j, n);
            if (k < 1)
                throw validation_error("spec.schedule",
                                       "k_" + std::to_string(j) + "(n=" + std::to_string(n) +
                                           ")=" + std::to_string(k) + " must be >= 1");
            auto [it, fresh] = seen.emplace(k, j);
            if (!fresh)
                throw validation_error("spec.schedule",
                                       "k_" + std::to_string(j) + "(n=" + std::to_string(n) +
                                           ")=" + std::to_string(k) + " collides with k_" +
                                           std::to_string(it->second));
            ks[j] = k;
        }
        return ks;
    }
};

// g_n(z) = sum_{j != 0} alpha_j z^{k_j(n)} / sqrt(min(|k_j(n)|, n)) when normalized,
// the same sum without the weights otherwise.
inline laurent_series build_symbol(const symbol_spec& spec, std::int64_t n,
                                   bool normalize = true) {
    const auto ks = spec.frequencies(n);
    laurent_series g;
    for (const auto& [j, k] : ks) {
        const double w =
            normalize ? 1.0 / std::sqrt(static_cast<double>(std::min<std::int64_t>(k, n))) : 1.0;
        const cplx ap = spec.alpha(j);
        const cplx am = spec.alpha(-j);
        if (ap != cplx(0.0, 0.0)) g.add_to(k, w * ap);
        if (am != cplx(0.0, 0.0)) g.add_to(-k, w * am);
    }
    return g;
}

struct split_result {
    laurent_series g1;  // frequencies with 0 < |k| <= n, plus any k = 0 term
    laurent_series g2;  // frequencies with |k| > n
    bool zero_frequency_present = false;
};

// Exact partition of the stored coefficients; the parent tail_bound is inherited by
// both halves (the omitted mass may lie on either side of the cut).
inline split_result split_symbol(const laurent_series& g, std::int64_t n) {
    if (n < 1) throw validation_error("split_symbol.n", "cut must be >= 1");
    split_result r;
    for (const auto& [k, v] : g.coeffs) {
        if (k == 0) {
            r.g1.set(k, v);
            r.zero_frequency_present = true;
        } else if (std::llabs(k) <= n) {
            r.g1.set(k, v);
        } else {
            r.g2.set(k, v);
        }
    }
    r.g1.tail_bound = g.tail_bound;
    r.g2.tail_bound = g.tail_bound;
    return r;
}

} // namespace szegolab
