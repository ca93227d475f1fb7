#pragma once

// Experiment dispatch: one config in, one fixed-schema report out. Per-n
// quantities appear once for every n in the sweep; whole-sweep aggregates
// (rate fits) are emitted as summary rows with n = 0.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "szegolab/config.hpp"
#include "szegolab/cue.hpp"
#include "szegolab/exp_symbol.hpp"
#include "szegolab/fit.hpp"
#include "szegolab/report.hpp"
#include "szegolab/szego.hpp"
#include "szegolab/toeplitz.hpp"

namespace szegolab {

namespace detail {

struct row_sink {
    experiment_report& rep;
    std::string experiment;
    std::uint64_t seed;

    void add(std::int64_t n, std::string quantity, cplx value, double stderr_or_bound,
             cplx target, bool holds) {
        report_row r;
        r.experiment = experiment;
        r.n = n;
        r.quantity = std::move(quantity);
        r.value_re = value.real();
        r.value_im = value.imag();
        r.stderr_or_bound = stderr_or_bound;
        r.target_re = target.real();
        r.target_im = target.imag();
        r.holds = holds;
        r.seed = seed;
        rep.rows.push_back(std::move(r));
    }

    // rate fit over per-n rows; unavailable fits are reported, never fatal
    void add_fit(const fit_result& fit, const std::string& of) {
        if (fit.available) {
            add(0, "fit_slope[" + of + "]", cplx(fit.slope, 0.0), 0.0, cplx(0.0, 0.0), true);
            add(0, "fit_r2[" + of + "]", cplx(fit.r2, 0.0), 0.0, cplx(1.0, 0.0), true);
        } else {
            add(0, "fit_unavailable[" + of + "]",
                cplx(static_cast<double>(fit.points_used), 0.0), 0.0, cplx(0.0, 0.0), true);
        }
    }
};

inline bool fin(double v) { return std::isfinite(v); }
inline bool fin(cplx v) { return finite(v); }

} // namespace detail

inline experiment_report run_experiment(const experiment_config& cfg, int threads = 1) {
    cfg.validate();
    experiment_report rep;
    rep.tool_version = k_tool_version;
    rep.config = config_to_json(cfg);
    rep.config_hash = config_hash(cfg);

    const tolerance_config& tol = cfg.tolerances;
    detail::row_sink sink{rep, to_string(cfg.experiment),
                          is_mc_experiment(cfg.experiment) ? cfg.mc.seed : 0};
    const auto t0 = std::chrono::steady_clock::now();

    switch (cfg.experiment) {
        case experiment_kind::szego_sweep: {
            const szego_sweep_result sw = szego_sweep(cfg.spec, cfg.n_values, tol.symbol_tol);
            for (const convergence_row& r : sw.rows)
                sink.add(r.n, "det_gap", r.value, r.abs_error, r.target,
                         detail::fin(r.abs_error));
            sink.add_fit(sw.fit, "det_gap");
            break;
        }
        case experiment_kind::bo_check: {
            for (const std::int64_t n : cfg.n_values) {
                const bo_result r = bo_evaluate(cfg.spec, n, 0, tol.fredholm_tol, tol.symbol_tol);
                sink.add(n, "bo_rel_discrepancy", cplx(r.rel_discrepancy, 0.0), r.det_gap_bound,
                         cplx(0.0, 0.0), r.rel_discrepancy <= tol.identity_tol);
                sink.add(n, "bo_kernel_tail", cplx(r.kernel_tail, 0.0),
                         static_cast<double>(r.window_m), cplx(0.0, 0.0),
                         r.kernel_tail <= tol.fredholm_tol);
            }
            break;
        }
        case experiment_kind::widom_check: {
            for (const std::int64_t n : cfg.n_values) {
                const laurent_series g = build_symbol(cfg.spec, n);
                const split_result sp = split_symbol(g, n);
                const laurent_series a = exp_symbol_auto(sp.g1, n, tol.symbol_tol);
                const laurent_series b = exp_symbol_auto(sp.g2, n, tol.symbol_tol);
                const widom_result r = widom_residual(a, b, n);
                sink.add(n, "widom_residual_rel", cplx(r.residual_rel, 0.0), r.residual_abs,
                         cplx(0.0, 0.0), r.residual_rel <= tol.identity_tol);
            }
            break;
        }
        case experiment_kind::bn_residual: {
            std::vector<convergence_row> trend;
            for (const std::int64_t n : cfg.n_values) {
                const laurent_series g = build_symbol(cfg.spec, n);
                const split_result sp = split_symbol(g, n);
                const approx_inverse_result r =
                    approx_inverse_residual(sp.g1, n, tol.symbol_tol);
                sink.add(n, "bn_trace_norm_residual", cplx(r.trace_norm_residual, 0.0),
                         r.op_norm_residual, cplx(0.0, 0.0), detail::fin(r.trace_norm_residual));
                sink.add(n, "bn_det_gap", r.det_bn_tna,
                         std::abs(r.det_bn_tna - cplx(1.0, 0.0)), cplx(1.0, 0.0),
                         detail::fin(r.det_bn_tna));
                sink.add(n, "bn_identity_residual", cplx(r.identity_residual, 0.0), 0.0,
                         cplx(0.0, 0.0), r.identity_residual <= tol.identity_tol);
                convergence_row row;
                row.n = n;
                row.value = cplx(r.trace_norm_residual, 0.0);
                row.abs_error = r.trace_norm_residual;
                trend.push_back(row);
            }
            sink.add_fit(fit_rate(trend, 10.0 * tol.symbol_tol), "bn_trace_norm_residual");
            break;
        }
        case experiment_kind::separation: {
            for (const std::int64_t n : cfg.n_values) {
                const separation_result r = separation_ratio(cfg.spec, n, tol.symbol_tol);
                sink.add(n, "separation_ratio", r.ratio, r.abs_error, cplx(1.0, 0.0),
                         detail::fin(r.abs_error));
            }
            break;
        }
        case experiment_kind::lemma_bounds: {
            for (const std::int64_t n : cfg.n_values)
                for (const lemma_check_row& r : lemma_bound_checks(cfg.spec, n, tol.symbol_tol))
                    sink.add(n, r.quantity, cplx(r.value, 0.0), r.bound, cplx(0.0, 0.0),
                             r.holds);
            break;
        }
        case experiment_kind::cancellation: {
            for (const std::int64_t n : cfg.n_values) {
                const laurent_series g = build_symbol(cfg.spec, n);
                const split_result sp = split_symbol(g, n);
                const auto freqs = cfg.spec.frequencies(n);
                std::vector<int> high_js;
                std::vector<std::int64_t> big_ns;
                for (const auto& [j, k] : freqs)
                    if (k > n) {
                        high_js.push_back(j);
                        big_ns.push_back(k);
                    }
                const auto rows = cancellation_diagnostics(sp.g1, n, big_ns, tol.symbol_tol);
                for (std::size_t i = 0; i < rows.size(); ++i)
                    sink.add(n, "cancel_sum[j=" + std::to_string(high_js[i]) + "]",
                             cplx(rows[i].scaled, 0.0), rows[i].value, cplx(0.0, 0.0),
                             detail::fin(rows[i].scaled));
                const cancellation_row tr =
                    cancellation_trace_term(sp.g1, sp.g2, n, tol.symbol_tol);
                sink.add(n, "cancel_trace", cplx(tr.scaled, 0.0), tr.value, cplx(0.0, 0.0),
                         detail::fin(tr.scaled));
            }
            break;
        }
        case experiment_kind::char_fn: {
            for (const std::int64_t n : cfg.n_values) {
                const mc_estimate e = char_fn_mc(cfg.spec, n, cfg.mc.samples, cfg.mc.seed,
                                                 threads);
                const laurent_series ig =
                    scale(build_symbol(cfg.spec, n), cplx(0.0, 1.0));
                const cplx det =
                    log_det(toeplitz_matrix(exp_symbol_auto(ig, n, tol.symbol_tol), n)).value();
                sink.add(n, "char_fn_mc", e.mean, e.std_error, det,
                         std::abs(e.mean - det) <= 3.0 * e.std_error);
            }
            break;
        }
        case experiment_kind::moments: {
            for (const std::int64_t n : cfg.n_values)
                for (const moment_row& r :
                     moment_suite(n, cfg.ks, cfg.mc.samples, cfg.mc.seed, threads)) {
                    std::string q = r.quantity + "[k=" + std::to_string(r.k);
                    if (r.quantity == "trace_pair") q += " l=" + std::to_string(r.l);
                    q += "]";
                    sink.add(n, std::move(q), r.value, r.std_error, r.target, r.holds);
                }
            break;
        }
        case experiment_kind::truncation: {
            for (const std::int64_t n : cfg.n_values)
                for (const truncation_row& r : truncation_sweep(cfg.spec, n, cfg.m_values,
                                                                cfg.mc.samples, cfg.mc.seed,
                                                                threads))
                    sink.add(n, "trunc_gap[m=" + std::to_string(r.m) + "]",
                             cplx(r.diff, 0.0), r.std_error, cplx(r.bound, 0.0), r.holds);
            break;
        }
        case experiment_kind::mock_gaussian: {
            for (const std::int64_t n : cfg.n_values) {
                const mock_gaussian_result r =
                    mock_gaussian_experiment(cfg.stat, n, cfg.mc.samples, cfg.mc.seed, threads);
                sink.add(n, "empirical_mean", r.empirical_mean.mean,
                         r.empirical_mean.std_error, cplx(0.0, 0.0),
                         std::abs(r.empirical_mean.mean) <= 3.0 * r.empirical_mean.std_error);
                const bool exploratory = cfg.stat.gamma == 1.0;
                const double target = exploratory ? r.sigma2_mock : r.sigma2_soshnikov;
                const double var = r.empirical_var.mean.real();
                const bool var_holds =
                    exploratory ||
                    std::abs(var - target) <=
                        std::max(3.0 * r.empirical_var.std_error, 0.1 * target);
                sink.add(n, "empirical_var", r.empirical_var.mean, r.empirical_var.std_error,
                         cplx(target, 0.0), var_holds);
                sink.add(n, "exact_cue_var", cplx(r.exact_cue_var, 0.0), 0.0,
                         cplx(target, 0.0), true);
                sink.add(n, "sigma2_mock", cplx(r.sigma2_mock, 0.0), 0.0,
                         cplx(r.sigma2_soshnikov, 0.0), true);
            }
            break;
        }
    }

    if (cfg.record_runtime) {
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        for (report_row& r : rep.rows) r.runtime_ms = ms;
    }
    return rep;
}

struct replay_result {
    report_row original;
    report_row reran;
    bool match = false;
};

// Re-runs the experiment restricted to the row's n (summary rows re-run the
// whole sweep) and compares the regenerated row bit for bit. Runtime stamps
// are not part of row identity.
inline replay_result replay_row(const experiment_report& rep, std::size_t row_index,
                                int threads = 1) {
    if (row_index >= rep.rows.size())
        throw validation_error("row", "row index " + std::to_string(row_index) +
                                          " out of range (report has " +
                                          std::to_string(rep.rows.size()) + " rows)");
    experiment_config cfg = config_from_json(rep.config);
    const report_row& orig = rep.rows[row_index];
    if (orig.n > 0) cfg.n_values = {orig.n};
    cfg.record_runtime = false;
    const experiment_report rerun = run_experiment(cfg, threads);
    for (const report_row& r : rerun.rows) {
        if (r.n != orig.n || r.quantity != orig.quantity) continue;
        replay_result out;
        out.original = orig;
        out.reran = r;
        out.match = r.value_re == orig.value_re && r.value_im == orig.value_im &&
                    r.stderr_or_bound == orig.stderr_or_bound &&
                    r.target_re == orig.target_re && r.target_im == orig.target_im &&
                    r.holds == orig.holds && r.seed == orig.seed;
        return out;
    }
    throw numeric_error("replay row=" + std::to_string(row_index),
                        "re-run did not reproduce quantity '" + orig.quantity + "' at n=" +
                            std::to_string(orig.n));
}

} // namespace szegolab
