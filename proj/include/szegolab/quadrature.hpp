#pragma once

// Gauss-Legendre quadrature: fixed composite rules for smooth oscillatory
// integrands and an adaptive driver for the spectral-density integrals.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "szegolab/errors.hpp"

namespace szegolab {

struct gl_rule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Nodes by Newton iteration on the Legendre recurrence; converges to machine
// precision from the Chebyshev initial guess in a handful of steps.
inline gl_rule make_gl_rule(int m) {
    gl_rule r;
    r.x.resize(m);
    r.w.resize(m);
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

inline const gl_rule& gl32() {
    static const gl_rule r = make_gl_rule(32);
    return r;
}

inline double integrate_gl(const std::function<double(double)>& f, double a, double b,
                           const gl_rule& rule) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(c + h * rule.x[i]);
    return s * h;
}

inline double composite_gl(const std::function<double(double)>& f, double a, double b,
                           int panels, const gl_rule& rule) {
    double s = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) s += integrate_gl(f, a + p * h, a + (p + 1) * h, rule);
    return s;
}

// Bisection-adaptive integral with a relative acceptance test. Smoothness is
// assumed piecewise; a kink only costs extra levels. Exceeding the depth budget
// reports non-convergence rather than returning a silent approximation.
// abs_tol sets the floor below which refinement stops: integrands that decay
// into rounding noise never satisfy a purely relative test.
inline double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                 double rel_tol, const std::string& what,
                                 double abs_tol = 0.0) {
    struct frame {
        double a, b, whole;
        int depth;
    };
    const auto& rule = gl32();
    std::vector<frame> stack{{a, b, integrate_gl(f, a, b, rule), 0}};
    double total = 0.0;
    std::int64_t evals = 0;
    while (!stack.empty()) {
        const frame fr = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (fr.a + fr.b);
        const double left = integrate_gl(f, fr.a, mid, rule);
        const double right = integrate_gl(f, mid, fr.b, rule);
        const double sum = left + right;
        evals += 2;
        if (std::abs(sum - fr.whole) <= rel_tol * std::abs(sum) + abs_tol + 1e-300 ||
            fr.depth >= 24) {
            if (fr.depth >= 24 &&
                std::abs(sum - fr.whole) > 1e-6 * std::abs(sum) + abs_tol + 1e-300)
                throw numeric_error("quadrature " + what,
                                    "adaptive quadrature failed to converge on [" +
                                        std::to_string(fr.a) + ", " + std::to_string(fr.b) + "]");
            total += sum;
            continue;
        }
        if (evals > 2000000)
            throw numeric_error("quadrature " + what,
                                "adaptive quadrature exceeded its evaluation budget");
        stack.push_back({fr.a, mid, left, fr.depth + 1});
        stack.push_back({mid, fr.b, right, fr.depth + 1});
    }
    return total;
}

} // namespace szegolab
