#pragma once

// Convergence rows and log-log rate fitting shared by the engine and the CLI.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "szegolab/laurent.hpp"

namespace szegolab {

struct convergence_row {
    std::int64_t n = 0;
    cplx value{0.0, 0.0};
    cplx target{0.0, 0.0};
    double abs_error = 0.0;  // |value - target|
    double bound = 0.0;      // certified bound where one exists, else 0
    double runtime_ms = 0.0;
};

struct fit_result {
    bool available = false;
    double slope = 0.0;      // natural-log / natural-log regression slope
    double intercept = 0.0;
    double r2 = 0.0;
    std::int64_t points_used = 0;
};

// Least squares of ln(abs_error) against ln(n). Rows at or below the noise floor
// are excluded so saturated errors do not pollute the regression; fewer than three
// usable rows yields the unavailable marker rather than an error.
inline fit_result fit_rate(const std::vector<convergence_row>& rows, double noise_floor) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows)
        if (r.n >= 1 && r.abs_error > noise_floor && std::isfinite(r.abs_error))
            pts.emplace_back(std::log(static_cast<double>(r.n)), std::log(r.abs_error));
    fit_result f;
    f.points_used = static_cast<std::int64_t>(pts.size());
    if (pts.size() < 3) return f;
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) return f;  // all n equal: no rate information
    f.available = true;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

} // namespace szegolab
