#pragma once

// Experiment configuration: a single JSON document per run. Parsing is strict
// (unknown keys are rejected, errors carry field paths) and serialization is
// canonical (every field emitted, fixed order), so parse(serialize(c)) == c and
// the config hash is stable.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "szegolab/cue.hpp"
#include "szegolab/errors.hpp"
#include "szegolab/symbol.hpp"

namespace szegolab {

inline constexpr const char* k_tool_version = "0.1.0";

enum class experiment_kind {
    szego_sweep,
    bo_check,
    widom_check,
    bn_residual,
    separation,
    lemma_bounds,
    cancellation,
    char_fn,
    moments,
    truncation,
    mock_gaussian,
};

inline const char* to_string(experiment_kind e) {
    switch (e) {
        case experiment_kind::szego_sweep: return "szego_sweep";
        case experiment_kind::bo_check: return "bo_check";
        case experiment_kind::widom_check: return "widom_check";
        case experiment_kind::bn_residual: return "bn_residual";
        case experiment_kind::separation: return "separation";
        case experiment_kind::lemma_bounds: return "lemma_bounds";
        case experiment_kind::cancellation: return "cancellation";
        case experiment_kind::char_fn: return "char_fn";
        case experiment_kind::moments: return "moments";
        case experiment_kind::truncation: return "truncation";
        case experiment_kind::mock_gaussian: return "mock_gaussian";
    }
    return "unknown";
}

inline experiment_kind experiment_from_string(const std::string& s) {
    for (const experiment_kind e :
         {experiment_kind::szego_sweep, experiment_kind::bo_check, experiment_kind::widom_check,
          experiment_kind::bn_residual, experiment_kind::separation,
          experiment_kind::lemma_bounds, experiment_kind::cancellation,
          experiment_kind::char_fn, experiment_kind::moments, experiment_kind::truncation,
          experiment_kind::mock_gaussian})
        if (s == to_string(e)) return e;
    throw validation_error("experiment", "unknown experiment '" + s + "'");
}

inline bool is_mc_experiment(experiment_kind e) {
    return e == experiment_kind::char_fn || e == experiment_kind::moments ||
           e == experiment_kind::truncation || e == experiment_kind::mock_gaussian;
}

struct mc_config {
    std::int64_t samples = 10000;
    std::uint64_t seed = 1;
};

struct tolerance_config {
    double symbol_tol = 1e-12;
    double fredholm_tol = 1e-10;
    double identity_tol = 1e-8;
};

struct experiment_config {
    experiment_kind experiment = experiment_kind::szego_sweep;
    symbol_spec spec;
    std::vector<std::int64_t> n_values;
    mc_config mc;
    tolerance_config tolerances;
    std::string output_path;
    std::vector<std::int64_t> ks;        // moments: trace powers
    std::vector<std::int64_t> m_values;  // truncation: cut points
    scaled_stat stat;                    // mock_gaussian: statistic family
    bool record_runtime = false;         // stamps wall time on rows, breaking byte determinism

    void validate() const {
        if (n_values.empty())
            throw validation_error("n_values", "need at least one matrix size");
        for (std::size_t i = 0; i < n_values.size(); ++i) {
            if (n_values[i] < 1)
                throw validation_error("n_values", "matrix sizes must be >= 1");
            if (i > 0 && n_values[i] <= n_values[i - 1])
                throw validation_error("n_values", "matrix sizes must be strictly increasing");
        }
        if (is_mc_experiment(experiment) && mc.samples < 100)
            throw validation_error("mc.samples", "Monte Carlo experiments need >= 100 samples");
        if (!(tolerances.symbol_tol > 0.0))
            throw validation_error("tolerances.symbol_tol", "must be positive");
        if (!(tolerances.fredholm_tol > 0.0))
            throw validation_error("tolerances.fredholm_tol", "must be positive");
        if (!(tolerances.identity_tol > 0.0))
            throw validation_error("tolerances.identity_tol", "must be positive");
        spec.validate();
        if (experiment == experiment_kind::moments && ks.empty())
            throw validation_error("ks", "the moments experiment needs trace powers");
        if (experiment == experiment_kind::truncation) {
            if (m_values.empty())
                throw validation_error("m_values", "the truncation experiment needs cut points");
            if (!spec.hermitian)
                throw validation_error("spec.hermitian",
                                       "the truncation experiment needs a hermitian spec");
        }
        if (experiment == experiment_kind::mock_gaussian) stat.validate();
        for (const std::int64_t m : m_values)
            if (m < 0) throw validation_error("m_values", "cut points must be >= 0");
    }
};

// ---------------------------------------------------------------------------
// JSON plumbing
// ---------------------------------------------------------------------------

namespace detail {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

inline void require_keys(const json& o, const std::vector<std::string>& allowed,
                         const std::string& path) {
    if (!o.is_object()) throw validation_error(path, "expected a JSON object");
    for (const auto& [key, v] : o.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw validation_error(path + "." + key, "unknown field");
}

inline const json& require_field(const json& o, const char* key, const std::string& path) {
    auto it = o.find(key);
    if (it == o.end()) throw validation_error(path + "." + key, "missing field");
    return *it;
}

inline double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) throw validation_error(path, "expected a number");
    return v.get<double>();
}

inline std::int64_t as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw validation_error(path, "expected an integer");
    return v.get<std::int64_t>();
}

inline std::uint64_t as_uint(const json& v, const std::string& path) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw validation_error(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw validation_error(path, "expected a boolean");
    return v.get<bool>();
}

inline std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw validation_error(path, "expected a string");
    return v.get<std::string>();
}

inline std::vector<std::int64_t> as_int_list(const json& v, const std::string& path) {
    if (!v.is_array()) throw validation_error(path, "expected an array");
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_int(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

} // namespace detail

inline nlohmann::ordered_json spec_to_json(const symbol_spec& spec) {
    using detail::ojson;
    ojson js;
    js["hermitian"] = spec.hermitian;
    ojson alphas = ojson::array();
    for (const auto& [j, a] : spec.alphas) {
        ojson e;
        e["j"] = j;
        e["re"] = a.real();
        e["im"] = a.imag();
        alphas.push_back(std::move(e));
    }
    js["alphas"] = std::move(alphas);
    ojson sched;
    switch (spec.schedule.type) {
        case symbol_schedule::kind::fixed: {
            sched["type"] = "fixed";
            ojson terms = ojson::array();
            for (const auto& [j, k] : spec.schedule.fixed) {
                ojson t;
                t["j"] = j;
                t["k"] = k;
                terms.push_back(std::move(t));
            }
            sched["terms"] = std::move(terms);
            break;
        }
        case symbol_schedule::kind::affine: {
            sched["type"] = "affine";
            ojson terms = ojson::array();
            for (const auto& [j, ad] : spec.schedule.affine) {
                ojson t;
                t["j"] = j;
                t["c"] = ad.c;
                t["d"] = ad.d;
                terms.push_back(std::move(t));
            }
            sched["terms"] = std::move(terms);
            break;
        }
        case symbol_schedule::kind::table: {
            sched["type"] = "table";
            ojson entries = ojson::array();
            for (const auto& [n, row] : spec.schedule.table) {
                ojson e;
                e["n"] = n;
                ojson terms = ojson::array();
                for (const auto& [j, k] : row) {
                    ojson t;
                    t["j"] = j;
                    t["k"] = k;
                    terms.push_back(std::move(t));
                }
                e["terms"] = std::move(terms);
                entries.push_back(std::move(e));
            }
            sched["entries"] = std::move(entries);
            break;
        }
    }
    js["schedule"] = std::move(sched);
    return js;
}

inline symbol_spec spec_from_json(const nlohmann::json& js, const std::string& path = "spec") {
    using namespace detail;
    require_keys(js, {"hermitian", "alphas", "schedule"}, path);
    symbol_spec spec;
    spec.hermitian = as_bool(require_field(js, "hermitian", path), path + ".hermitian");
    const json& alphas = require_field(js, "alphas", path);
    if (!alphas.is_array()) throw validation_error(path + ".alphas", "expected an array");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const std::string p = path + ".alphas[" + std::to_string(i) + "]";
        require_keys(alphas[i], {"j", "re", "im"}, p);
        const int j = static_cast<int>(as_int(require_field(alphas[i], "j", p), p + ".j"));
        if (spec.alphas.count(j)) throw validation_error(p + ".j", "duplicate index");
        spec.alphas[j] = cplx(as_double(require_field(alphas[i], "re", p), p + ".re"),
                              as_double(require_field(alphas[i], "im", p), p + ".im"));
    }
    const json& sched = require_field(js, "schedule", path);
    const std::string sp = path + ".schedule";
    const std::string type = as_string(require_field(sched, "type", sp), sp + ".type");
    if (type == "fixed") {
        require_keys(sched, {"type", "terms"}, sp);
        spec.schedule.type = symbol_schedule::kind::fixed;
        const json& terms = require_field(sched, "terms", sp);
        if (!terms.is_array()) throw validation_error(sp + ".terms", "expected an array");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string p = sp + ".terms[" + std::to_string(i) + "]";
            require_keys(terms[i], {"j", "k"}, p);
            const int j = static_cast<int>(as_int(require_field(terms[i], "j", p), p + ".j"));
            spec.schedule.fixed[j] = as_int(require_field(terms[i], "k", p), p + ".k");
        }
    } else if (type == "affine") {
        require_keys(sched, {"type", "terms"}, sp);
        spec.schedule.type = symbol_schedule::kind::affine;
        const json& terms = require_field(sched, "terms", sp);
        if (!terms.is_array()) throw validation_error(sp + ".terms", "expected an array");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const std::string p = sp + ".terms[" + std::to_string(i) + "]";
            require_keys(terms[i], {"j", "c", "d"}, p);
            const int j = static_cast<int>(as_int(require_field(terms[i], "j", p), p + ".j"));
            spec.schedule.affine[j] = {as_double(require_field(terms[i], "c", p), p + ".c"),
                                       as_int(require_field(terms[i], "d", p), p + ".d")};
        }
    } else if (type == "table") {
        require_keys(sched, {"type", "entries"}, sp);
        spec.schedule.type = symbol_schedule::kind::table;
        const json& entries = require_field(sched, "entries", sp);
        if (!entries.is_array()) throw validation_error(sp + ".entries", "expected an array");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const std::string p = sp + ".entries[" + std::to_string(i) + "]";
            require_keys(entries[i], {"n", "terms"}, p);
            const std::int64_t n = as_int(require_field(entries[i], "n", p), p + ".n");
            const json& terms = require_field(entries[i], "terms", p);
            if (!terms.is_array()) throw validation_error(p + ".terms", "expected an array");
            for (std::size_t t = 0; t < terms.size(); ++t) {
                const std::string q = p + ".terms[" + std::to_string(t) + "]";
                require_keys(terms[t], {"j", "k"}, q);
                const int j = static_cast<int>(as_int(require_field(terms[t], "j", q), q + ".j"));
                spec.schedule.table[n][j] = as_int(require_field(terms[t], "k", q), q + ".k");
            }
        }
    } else {
        throw validation_error(sp + ".type", "unknown schedule type '" + type + "'");
    }
    return spec;
}

inline nlohmann::ordered_json stat_to_json(const scaled_stat& st) {
    using detail::ojson;
    ojson js;
    js["family"] = st.family == scaled_stat::family_kind::bump_derivative ? "bump_derivative"
                                                                          : "bandlimited";
    js["scale"] = st.scale;
    js["gamma"] = st.gamma;
    ojson table = ojson::array();
    for (const auto& [y, v] : st.fhat_table) {
        ojson e;
        e["y"] = y;
        e["re"] = v.real();
        e["im"] = v.imag();
        table.push_back(std::move(e));
    }
    js["fhat_table"] = std::move(table);
    return js;
}

inline scaled_stat stat_from_json(const nlohmann::json& js, const std::string& path = "stat") {
    using namespace detail;
    require_keys(js, {"family", "scale", "gamma", "fhat_table"}, path);
    scaled_stat st;
    const std::string fam = as_string(require_field(js, "family", path), path + ".family");
    if (fam == "bump_derivative")
        st.family = scaled_stat::family_kind::bump_derivative;
    else if (fam == "bandlimited")
        st.family = scaled_stat::family_kind::bandlimited;
    else
        throw validation_error(path + ".family", "unknown statistic family '" + fam + "'");
    st.scale = as_double(require_field(js, "scale", path), path + ".scale");
    st.gamma = as_double(require_field(js, "gamma", path), path + ".gamma");
    const json& table = require_field(js, "fhat_table", path);
    if (!table.is_array()) throw validation_error(path + ".fhat_table", "expected an array");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const std::string p = path + ".fhat_table[" + std::to_string(i) + "]";
        require_keys(table[i], {"y", "re", "im"}, p);
        st.fhat_table.emplace_back(
            as_double(require_field(table[i], "y", p), p + ".y"),
            cplx(as_double(require_field(table[i], "re", p), p + ".re"),
                 as_double(require_field(table[i], "im", p), p + ".im")));
    }
    return st;
}

inline nlohmann::ordered_json config_to_json(const experiment_config& cfg) {
    using detail::ojson;
    ojson js;
    js["experiment"] = to_string(cfg.experiment);
    js["spec"] = spec_to_json(cfg.spec);
    js["n_values"] = cfg.n_values;
    js["mc"] = ojson{{"samples", cfg.mc.samples}, {"seed", cfg.mc.seed}};
    js["tolerances"] = ojson{{"symbol_tol", cfg.tolerances.symbol_tol},
                             {"fredholm_tol", cfg.tolerances.fredholm_tol},
                             {"identity_tol", cfg.tolerances.identity_tol}};
    js["output_path"] = cfg.output_path;
    js["ks"] = cfg.ks;
    js["m_values"] = cfg.m_values;
    js["stat"] = stat_to_json(cfg.stat);
    js["record_runtime"] = cfg.record_runtime;
    return js;
}

inline experiment_config config_from_json(const nlohmann::json& js) {
    using namespace detail;
    require_keys(js,
                 {"experiment", "spec", "n_values", "mc", "tolerances", "output_path", "ks",
                  "m_values", "stat", "record_runtime"},
                 "config");
    experiment_config cfg;
    cfg.experiment = experiment_from_string(
        as_string(require_field(js, "experiment", "config"), "experiment"));
    if (js.contains("spec")) cfg.spec = spec_from_json(js["spec"]);
    cfg.n_values = as_int_list(require_field(js, "n_values", "config"), "n_values");
    if (js.contains("mc")) {
        const json& mc = js["mc"];
        require_keys(mc, {"samples", "seed"}, "mc");
        if (mc.contains("samples")) cfg.mc.samples = as_int(mc["samples"], "mc.samples");
        if (mc.contains("seed")) cfg.mc.seed = as_uint(mc["seed"], "mc.seed");
    }
    if (js.contains("tolerances")) {
        const json& t = js["tolerances"];
        require_keys(t, {"symbol_tol", "fredholm_tol", "identity_tol"}, "tolerances");
        if (t.contains("symbol_tol"))
            cfg.tolerances.symbol_tol = as_double(t["symbol_tol"], "tolerances.symbol_tol");
        if (t.contains("fredholm_tol"))
            cfg.tolerances.fredholm_tol = as_double(t["fredholm_tol"], "tolerances.fredholm_tol");
        if (t.contains("identity_tol"))
            cfg.tolerances.identity_tol = as_double(t["identity_tol"], "tolerances.identity_tol");
    }
    if (js.contains("output_path"))
        cfg.output_path = as_string(js["output_path"], "output_path");
    if (js.contains("ks")) cfg.ks = as_int_list(js["ks"], "ks");
    if (js.contains("m_values")) cfg.m_values = as_int_list(js["m_values"], "m_values");
    if (js.contains("stat")) cfg.stat = stat_from_json(js["stat"]);
    if (js.contains("record_runtime"))
        cfg.record_runtime = as_bool(js["record_runtime"], "record_runtime");
    cfg.validate();
    return cfg;
}

inline experiment_config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path, "cannot open config file");
    nlohmann::json js;
    try {
        js = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error("config", std::string("JSON parse error: ") + e.what());
    }
    return config_from_json(js);
}

// FNV-1a over the canonical serialization: stable across runs and platforms
// with identical doubles.
inline std::string config_hash(const experiment_config& cfg) {
    const std::string s = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace szegolab
