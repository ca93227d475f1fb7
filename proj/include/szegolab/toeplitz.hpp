#pragma once

// Dense finite sections of Toeplitz and Hankel operators, log-determinants, and
// the regularized determinant det2. Eigen supplies the factorizations; overflow
// safety comes from carrying determinants as (log modulus, phase).

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "szegolab/errors.hpp"
#include "szegolab/laurent.hpp"

namespace szegolab {

enum class matrix_role { toeplitz, hankel_block, generic };

inline const char* role_name(matrix_role r) {
    switch (r) {
        case matrix_role::toeplitz: return "toeplitz";
        case matrix_role::hankel_block: return "hankel_block";
        case matrix_role::generic: return "generic";
    }
    return "?";
}

struct dense_matrix {
    Eigen::MatrixXcd values;
    matrix_role role = matrix_role::generic;

    dense_matrix() = default;
    dense_matrix(Eigen::MatrixXcd v, matrix_role r) : values(std::move(v)), role(r) {
        if (!values.allFinite())
            throw validation_error("dense_matrix", std::string(role_name(r)) +
                                                       " matrix has non-finite entries");
    }
    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

struct log_det_result {
    double log_modulus = 0.0;  // -inf marks a singular matrix (not an error)
    double phase = 0.0;        // in (-pi, pi]

    cplx value() const {
        if (log_modulus == -std::numeric_limits<double>::infinity()) return cplx(0.0, 0.0);
        return std::exp(log_modulus) * cplx(std::cos(phase), std::sin(phase));
    }
};

inline double wrap_phase(double x) {
    double r = std::remainder(x, 2.0 * std::numbers::pi);
    if (r <= -std::numbers::pi) r += 2.0 * std::numbers::pi;
    return r;
}

// T_n(c): entry (j,l) = c_{j-l}, 1 <= j,l <= n
inline dense_matrix toeplitz_matrix(const laurent_series& c, std::int64_t n) {
    if (n < 1) throw validation_error("toeplitz_matrix.n", "size must be >= 1");
    Eigen::MatrixXcd m(n, n);
    for (std::int64_t j = 0; j < n; ++j)
        for (std::int64_t l = 0; l < n; ++l) m(j, l) = c.coeff(j - l);
    return dense_matrix(std::move(m), matrix_role::toeplitz);
}

// Rectangular slice of the Hankel operator H(c)_{j,l} = c_{j+l-1} with j in
// [row0+1, row0+rows] and l in [col0+1, col0+cols] (offsets are 0-based counts).
inline Eigen::MatrixXcd hankel_slice(const laurent_series& c, std::int64_t row0,
                                     std::int64_t rows, std::int64_t col0, std::int64_t cols) {
    if (rows < 0 || cols < 0 || row0 < 0 || col0 < 0)
        throw validation_error("hankel_slice", "offsets and sizes must be >= 0");
    Eigen::MatrixXcd m(rows, cols);
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t s = 0; s < cols; ++s) m(r, s) = c.coeff(row0 + col0 + r + s + 1);
    return m;
}

// sqrt( sum_{k >= 1} k |c_{k+R}|^2 ): Hilbert-Schmidt mass of the Hankel rows beyond R
inline double hankel_hs_tail(const laurent_series& c, std::int64_t R) {
    double s = 0.0;
    for (const auto& [k, v] : c.coeffs)
        if (k > R) s += static_cast<double>(k - R) * std::norm(v);
    return std::sqrt(s);
}

struct hankel_block_result {
    dense_matrix block;       // (Q_n H(phi) H(psi) Q_n) restricted to [n+1, n+M]^2
    double tail_bound = 0.0;  // HS product bound on the omitted indices (> n+M)
};

// K_{j,l} = sum_{m=1}^{Mprime} phi_{j+m-1} psi_{m+l-1}, j,l in [n+1, n+M].
inline hankel_block_result hankel_product_block(const laurent_series& phi,
                                                const laurent_series& psi, std::int64_t n,
                                                std::int64_t M, std::int64_t Mprime) {
    if (n < 0) throw validation_error("hankel_product_block.n", "offset must be >= 0");
    if (M < 1) throw validation_error("hankel_product_block.M", "block size must be >= 1");
    if (Mprime < 0) throw validation_error("hankel_product_block.Mprime", "inner cut must be >= 0");
    hankel_block_result r;
    if (Mprime == 0) {
        r.block = dense_matrix(Eigen::MatrixXcd::Zero(M, M), matrix_role::hankel_block);
    } else {
        const Eigen::MatrixXcd left = hankel_slice(phi, n, M, 0, Mprime);
        const Eigen::MatrixXcd right = hankel_slice(psi, 0, Mprime, n, M);
        r.block = dense_matrix(left * right, matrix_role::hankel_block);
    }
    r.tail_bound = hankel_hs_tail(phi, n + M) * hankel_hs_tail(psi, n + M);
    return r;
}

// Inner cut that makes the block sum exact for finitely supported series.
inline std::int64_t hankel_inner_cut(const laurent_series& phi, const laurent_series& psi,
                                     std::int64_t n) {
    if (phi.empty() || psi.empty()) return 0;
    const std::int64_t m = std::min(phi.max_freq(), psi.max_freq()) - n;
    return std::max<std::int64_t>(m, 0);
}

// Similarity by the index-reversal permutation: (j,l) -> (n+1-j, n+1-l).
inline dense_matrix flip_conjugate(const dense_matrix& a) {
    if (a.rows() != a.cols())
        throw validation_error("flip_conjugate", "matrix must be square");
    const Eigen::Index n = a.rows();
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index s = 0; s < n; ++s) m(r, s) = a.values(n - 1 - r, n - 1 - s);
    return dense_matrix(std::move(m), a.role);
}

// LU with partial pivoting, accumulating log|u_ii| and phases. A zero pivot yields
// log_modulus = -inf rather than an error.
inline log_det_result log_det(const dense_matrix& a) {
    if (a.rows() != a.cols()) throw validation_error("log_det", "matrix must be square");
    const Eigen::Index n = a.rows();
    log_det_result r;
    if (n == 0) return r;  // det of the empty matrix is 1
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a.values);
    double lm = 0.0, ph = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx u = lu.matrixLU()(i, i);
        const double m = std::abs(u);
        if (m == 0.0) {
            r.log_modulus = -std::numeric_limits<double>::infinity();
            r.phase = 0.0;
            return r;
        }
        lm += std::log(m);
        ph = wrap_phase(ph + std::arg(u));
    }
    if (lu.permutationP().determinant() < 0) ph = wrap_phase(ph + std::numbers::pi);
    r.log_modulus = lm;
    r.phase = ph;
    return r;
}

struct det2_result {
    cplx value;          // det(I + A) * exp(-tr A)
    double bound = 0.0;  // ||A||_2 * exp(((||A||_2 + 1)^2) / 2), valid for |value - 1|
};

inline det2_result det2(const dense_matrix& a) {
    if (a.rows() != a.cols()) throw validation_error("det2", "matrix must be square");
    const Eigen::Index n = a.rows();
    const cplx tr = a.values.trace();
    dense_matrix ipa(Eigen::MatrixXcd::Identity(n, n) + a.values, matrix_role::generic);
    const log_det_result ld = log_det(ipa);
    det2_result r;
    if (ld.log_modulus == -std::numeric_limits<double>::infinity()) {
        r.value = cplx(0.0, 0.0);
    } else {
        const double lm = ld.log_modulus - tr.real();
        const double ph = wrap_phase(ld.phase - tr.imag());
        r.value = std::exp(lm) * cplx(std::cos(ph), std::sin(ph));
    }
    const double hs = a.values.norm();
    r.bound = hs * std::exp(0.5 * (hs + 1.0) * (hs + 1.0));
    return r;
}

struct matrix_norm_bundle {
    double op = 0.0;     // largest singular value
    double hs = 0.0;     // Frobenius
    double trace = 0.0;  // sum of singular values
};

inline matrix_norm_bundle matrix_norms(const dense_matrix& a) {
    matrix_norm_bundle r;
    r.hs = a.values.norm();
    if (a.rows() == 0 || a.cols() == 0) return r;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a.values);
    if (svd.info() != Eigen::Success)
        throw numeric_error("matrix_norms svd " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " role=" + role_name(a.role),
                            "singular value decomposition did not converge");
    const auto& sv = svd.singularValues();
    r.op = sv.size() > 0 ? sv(0) : 0.0;
    r.trace = sv.sum();
    return r;
}

} // namespace szegolab
