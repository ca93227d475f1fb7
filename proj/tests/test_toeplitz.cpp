// Dense Toeplitz/Hankel sections, log-determinants, det2, and matrix norms.
//
// Oracle policy: determinants are cross-checked against closed 2x2 arithmetic,
// eigenvalue products from an independent solver, and exact scaling laws;
// Hankel product blocks against a brute triple loop over the defining sum.

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "szegolab/exp_symbol.hpp"
#include "szegolab/laurent.hpp"
#include "szegolab/toeplitz.hpp"

using namespace szegolab;

namespace {

laurent_series series_of(std::initializer_list<std::pair<std::int64_t, cplx>> cs) {
    laurent_series r;
    for (const auto& [k, v] : cs) r.set(k, v);
    return r;
}

Eigen::MatrixXcd random_matrix(std::mt19937& rng, int n, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) m(r, s) = cplx(g(rng), g(rng));
    return m;
}

laurent_series random_series(std::mt19937& rng, std::int64_t lo, std::int64_t hi) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    laurent_series c;
    for (std::int64_t k = lo; k <= hi; ++k) c.set(k, cplx(u(rng), u(rng)));
    return c;
}

constexpr double kI0_2 = 2.2795853023360673;
constexpr double kI1_2 = 1.5906368546373291;

} // namespace

TEST_CASE("toeplitz_matrix lays out c_{j-l}") {
    laurent_series c = series_of({{-1, cplx(0, 5)}, {0, cplx(2, 0)}, {1, cplx(3, 0)}});
    const auto t = toeplitz_matrix(c, 3);
    REQUIRE(t.role == matrix_role::toeplitz);
    for (int j = 0; j < 3; ++j) REQUIRE(t.values(j, j) == cplx(2, 0));
    REQUIRE(t.values(1, 0) == cplx(3, 0));
    REQUIRE(t.values(2, 1) == cplx(3, 0));
    REQUIRE(t.values(0, 1) == cplx(0, 5));
    REQUIRE(t.values(0, 2) == cplx(0, 0));
    REQUIRE_THROWS_AS(toeplitz_matrix(c, 0), validation_error);
}

TEST_CASE("2x2 determinant of the exponential symbol matches Bessel arithmetic") {
    laurent_series g = series_of({{1, cplx(1, 0)}, {-1, cplx(1, 0)}});
    const auto a = exp_symbol_auto(g, 8, 1e-13);
    const auto ld = log_det(toeplitz_matrix(a, 2));
    const cplx direct = a.coeff(0) * a.coeff(0) - a.coeff(1) * a.coeff(-1);
    REQUIRE(std::abs(ld.value() - direct) < 1e-12);
    REQUIRE(std::abs(ld.value().real() - (kI0_2 * kI0_2 - kI1_2 * kI1_2)) < 1e-11);
    REQUIRE(std::abs(ld.value().imag()) < 1e-12);
}

TEST_CASE("log_det basics: singular, permutation, empty") {
    // all-ones 2x2 is singular
    laurent_series ones = series_of({{-1, cplx(1, 0)}, {0, cplx(1, 0)}, {1, cplx(1, 0)}});
    const auto s = log_det(toeplitz_matrix(ones, 2));
    REQUIRE(s.log_modulus == -std::numeric_limits<double>::infinity());
    REQUIRE(s.value() == cplx(0, 0));

    // antidiagonal [[0,1],[1,0]] has determinant -1
    laurent_series swap = series_of({{-1, cplx(1, 0)}, {1, cplx(1, 0)}});
    const auto p = log_det(toeplitz_matrix(swap, 2));
    REQUIRE(std::abs(p.log_modulus) < 1e-14);
    REQUIRE(std::abs(p.phase - std::numbers::pi) < 1e-14);

    const auto e = log_det(dense_matrix(Eigen::MatrixXcd(0, 0), matrix_role::generic));
    REQUIRE(e.value() == cplx(1, 0));
}

TEST_CASE("log_det is multiplicative and overflow-safe") {
    std::mt19937 rng(424242);
    for (int rep = 0; rep < 8; ++rep) {
        const auto A = random_matrix(rng, 6, 1.0);
        const auto B = random_matrix(rng, 6, 1.0);
        const auto la = log_det(dense_matrix(A, matrix_role::generic));
        const auto lb = log_det(dense_matrix(B, matrix_role::generic));
        const auto lab = log_det(dense_matrix(A * B, matrix_role::generic));
        REQUIRE(std::abs(lab.log_modulus - (la.log_modulus + lb.log_modulus)) <
                1e-10 * std::max(1.0, std::abs(lab.log_modulus)));
        REQUIRE(std::abs(wrap_phase(lab.phase - la.phase - lb.phase)) < 1e-9);
    }

    // det(2i * I_300) = (2i)^300: far beyond double range, exact in log space
    Eigen::MatrixXcd big = cplx(0, 2) * Eigen::MatrixXcd::Identity(300, 300);
    const auto lbig = log_det(dense_matrix(std::move(big), matrix_role::generic));
    REQUIRE(std::abs(lbig.log_modulus - 300.0 * std::log(2.0)) < 1e-9);
    REQUIRE(std::abs(lbig.phase - wrap_phase(300.0 * std::numbers::pi / 2.0)) < 1e-9);
}

TEST_CASE("transpose symmetry: det T_n(c) = det T_n(flip c)") {
    std::mt19937 rng(7);
    const auto c = random_series(rng, -3, 4);
    const auto d1 = log_det(toeplitz_matrix(c, 5));
    const auto d2 = log_det(toeplitz_matrix(flip(c), 5));
    REQUIRE(std::abs(d1.log_modulus - d2.log_modulus) < 1e-12 * std::max(1.0, std::abs(d1.log_modulus)));
    REQUIRE(std::abs(wrap_phase(d1.phase - d2.phase)) < 1e-11);
}

TEST_CASE("hankel_slice indexes c_{j+l-1}") {
    std::mt19937 rng(11);
    const auto c = random_series(rng, -2, 9);
    const auto h = hankel_slice(c, 0, 3, 0, 4);
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 4; ++s) REQUIRE(h(r, s) == c.coeff(r + s + 1));
    const auto off = hankel_slice(c, 2, 2, 3, 2);
    REQUIRE(off(0, 0) == c.coeff(6));
    REQUIRE(off(1, 1) == c.coeff(8));
    REQUIRE_THROWS_AS(hankel_slice(c, -1, 2, 0, 2), validation_error);
}

TEST_CASE("hankel_hs_tail equals the weighted coefficient sum") {
    std::mt19937 rng(13);
    const auto c = random_series(rng, 1, 10);
    double brute = 0.0;
    for (std::int64_t k = 5; k <= 10; ++k)
        brute += static_cast<double>(k - 4) * std::norm(c.coeff(k));
    REQUIRE(std::abs(hankel_hs_tail(c, 4) - std::sqrt(brute)) < 1e-14);
    REQUIRE(hankel_hs_tail(c, 10) == 0.0);
}

TEST_CASE("hankel_product_block matches the brute defining sum") {
    std::mt19937 rng(99);
    const auto phi = random_series(rng, -4, 12);
    const auto psi = random_series(rng, -6, 11);
    const std::int64_t n = 3, M = 5;
    const std::int64_t cut = hankel_inner_cut(phi, psi, n);
    REQUIRE(cut == 8);  // min(12, 11) - 3
    const auto blk = hankel_product_block(phi, psi, n, M, cut);
    for (std::int64_t j = 0; j < M; ++j)
        for (std::int64_t l = 0; l < M; ++l) {
            cplx brute(0, 0);
            for (std::int64_t m = 1; m <= 64; ++m)
                brute += phi.coeff(n + j + m) * psi.coeff(m + n + l);
            REQUIRE(std::abs(blk.block.values(j, l) - brute) < 1e-13);
        }
    REQUIRE(blk.block.role == matrix_role::hankel_block);
    REQUIRE(std::abs(blk.tail_bound -
                     hankel_hs_tail(phi, n + M) * hankel_hs_tail(psi, n + M)) < 1e-14);

    // zero inner cut yields the zero block
    const auto z = hankel_product_block(phi, psi, 20, 3, hankel_inner_cut(phi, psi, 20));
    REQUIRE(z.block.values.norm() == 0.0);
}

TEST_CASE("flip_conjugate realizes the reversal similarity") {
    std::mt19937 rng(5);
    const auto c = random_series(rng, -4, 4);
    const auto t = toeplitz_matrix(c, 4);
    const auto w = flip_conjugate(t);
    const auto tf = toeplitz_matrix(flip(c), 4);
    REQUIRE((w.values - tf.values).norm() == 0.0);
    REQUIRE_THROWS_AS(flip_conjugate(dense_matrix(Eigen::MatrixXcd::Zero(2, 3),
                                                  matrix_role::generic)),
                      validation_error);
}

TEST_CASE("det2 frozen values") {
    Eigen::MatrixXcd a1(1, 1);
    a1(0, 0) = cplx(0.3, 0.0);
    const auto r1 = det2(dense_matrix(a1, matrix_role::generic));
    REQUIRE(std::abs(r1.value - cplx(0.9630636868862332, 0.0)) < 1e-15);

    Eigen::MatrixXcd a2 = Eigen::MatrixXcd::Zero(2, 2);
    a2(0, 1) = cplx(0.5, 0.0);
    a2(1, 0) = cplx(-0.2, 0.0);
    const auto r2 = det2(dense_matrix(a2, matrix_role::generic));
    REQUIRE(std::abs(r2.value - cplx(1.1, 0.0)) < 1e-14);  // trace-free: det2 = det(I+A)

    const auto r0 = det2(dense_matrix(Eigen::MatrixXcd::Zero(3, 3), matrix_role::generic));
    REQUIRE(r0.value == cplx(1, 0));
    REQUIRE(r0.bound == 0.0);
}

TEST_CASE("det2 agrees with the eigenvalue product and obeys its bound") {
    std::mt19937 rng(31337);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 5);
        Eigen::MatrixXcd A = random_matrix(rng, n, 0.4);
        const double hs = A.norm();
        if (hs > 2.0) A *= 2.0 / hs;  // keep ||A||_2 <= 2
        const auto r = det2(dense_matrix(A, matrix_role::generic));
        REQUIRE(std::abs(r.value - cplx(1, 0)) <= r.bound * (1.0 + 1e-12));

        if (rep < 10) {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
            REQUIRE(es.info() == Eigen::Success);
            cplx prod(1, 0);
            for (int i = 0; i < n; ++i) {
                const cplx lam = es.eigenvalues()(i);
                prod *= (cplx(1, 0) + lam) * std::exp(-lam);
            }
            REQUIRE(std::abs(r.value - prod) < 1e-10 * std::max(1.0, std::abs(prod)));
        }
    }
}

TEST_CASE("matrix_norms: Hankel Hilbert-Schmidt identity and norm ordering") {
    std::mt19937 rng(2718);
    const auto c = random_series(rng, 1, 8);
    // H(c) vanishes outside the leading 8x8 square, so the finite slice is exact
    const auto h = hankel_slice(c, 0, 8, 0, 8);
    const auto nb = matrix_norms(dense_matrix(h, matrix_role::hankel_block));
    double hssq = 0.0;
    for (const auto& [k, v] : c.coeffs) hssq += static_cast<double>(k) * std::norm(v);
    REQUIRE(std::abs(nb.hs * nb.hs - hssq) < 1e-12);
    REQUIRE(nb.op <= nb.hs + 1e-12);
    REQUIRE(nb.hs <= nb.trace + 1e-12);

    // rank one: all three coincide
    Eigen::VectorXcd u(4);
    u << cplx(1, 0), cplx(0, 1), cplx(-0.5, 0.5), cplx(0.25, 0);
    const auto r1 = matrix_norms(dense_matrix(u * u.adjoint(), matrix_role::generic));
    REQUIRE(std::abs(r1.op - r1.hs) < 1e-12);
    REQUIRE(std::abs(r1.trace - r1.hs) < 1e-12);
}

TEST_CASE("non-finite entries are rejected with role context") {
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(1, 1) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    try {
        dense_matrix d(bad, matrix_role::toeplitz);
        FAIL("expected validation_error");
    } catch (const validation_error& e) {
        REQUIRE(std::string(e.what()).find("toeplitz") != std::string::npos);
    }
}

TEST_CASE("wrap_phase lands in (-pi, pi]") {
    REQUIRE(std::abs(wrap_phase(3.0 * std::numbers::pi) - std::numbers::pi) < 1e-14);
    REQUIRE(wrap_phase(std::numbers::pi) == std::numbers::pi);
    REQUIRE(std::abs(wrap_phase(-std::numbers::pi) - std::numbers::pi) < 1e-14);
    REQUIRE(std::abs(wrap_phase(4.0 * std::numbers::pi)) < 1e-14);
    REQUIRE(wrap_phase(0.25) == 0.25);
}