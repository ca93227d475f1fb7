#pragma once

// Report emission: fixed-schema rows to CSV or JSON, written atomically.
// Identical configs must produce byte-identical files, so all formatting is
// locale-free and field order is pinned.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "szegolab/errors.hpp"

namespace szegolab {

struct report_row {
    std::string experiment;
    std::int64_t n = 0;  // 0 marks a whole-sweep summary row (rate fits)
    std::string quantity;
    double value_re = 0.0;
    double value_im = 0.0;
    double stderr_or_bound = 0.0;
    double target_re = 0.0;
    double target_im = 0.0;
    bool holds = true;
    std::uint64_t seed = 0;
    double runtime_ms = 0.0;  // stays 0 unless the config opts into runtime stamps
};

struct experiment_report {
    std::string tool_version;
    std::string config_hash;
    nlohmann::ordered_json config;  // embedded for single-row replay
    std::vector<report_row> rows;

    bool all_hold() const {
        for (const auto& r : rows)
            if (!r.holds) return false;
        return true;
    }
};

namespace detail {

// %.17g: shortest text that still round-trips any double exactly
inline std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline const char* csv_header() {
    return "experiment,n,quantity,value_re,value_im,stderr_or_bound,target_re,target_im,holds,"
           "seed,runtime_ms";
}

inline std::string to_csv(const experiment_report& rep) {
    std::string out = csv_header();
    out += "\n";
    for (const auto& r : rep.rows) {
        // quantities are generated identifiers; a comma would corrupt the table
        if (r.quantity.find(',') != std::string::npos ||
            r.experiment.find(',') != std::string::npos)
            throw validation_error("report.quantity", "commas are not allowed in csv fields");
        out += r.experiment;
        out += ',';
        out += std::to_string(r.n);
        out += ',';
        out += r.quantity;
        out += ',';
        out += detail::num17(r.value_re);
        out += ',';
        out += detail::num17(r.value_im);
        out += ',';
        out += detail::num17(r.stderr_or_bound);
        out += ',';
        out += detail::num17(r.target_re);
        out += ',';
        out += detail::num17(r.target_im);
        out += ',';
        out += r.holds ? "true" : "false";
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += detail::num17(r.runtime_ms);
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json report_to_json(const experiment_report& rep) {
    nlohmann::ordered_json js;
    js["metadata"] = nlohmann::ordered_json{{"tool_version", rep.tool_version},
                                            {"config_hash", rep.config_hash},
                                            {"config", rep.config}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows) {
        nlohmann::ordered_json e;
        e["experiment"] = r.experiment;
        e["n"] = r.n;
        e["quantity"] = r.quantity;
        e["value_re"] = r.value_re;
        e["value_im"] = r.value_im;
        e["stderr_or_bound"] = r.stderr_or_bound;
        e["target_re"] = r.target_re;
        e["target_im"] = r.target_im;
        e["holds"] = r.holds;
        e["seed"] = r.seed;
        e["runtime_ms"] = r.runtime_ms;
        rows.push_back(std::move(e));
    }
    js["rows"] = std::move(rows);
    return js;
}

inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error(tmp.string(), "cannot open file for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw io_error(tmp.string(), "write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) throw io_error(path, "atomic rename failed: " + ec.message());
}

inline void emit_report(const experiment_report& rep, const std::string& format,
                        const std::string& path) {
    if (format == "csv") {
        write_file_atomic(path, to_csv(rep));
    } else if (format == "json") {
        write_file_atomic(path, report_to_json(rep).dump(2) + "\n");
    } else {
        throw validation_error("format", "unknown report format '" + format + "'");
    }
}

// JSON reports embed their config and are the replayable form; CSV carries rows only.
inline experiment_report load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path, "cannot open report file");
    nlohmann::ordered_json js;
    try {
        js = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error("report",
                               std::string("not a JSON report (CSV reports cannot be "
                                           "replayed): ") +
                                   e.what());
    }
    if (!js.contains("metadata") || !js.contains("rows"))
        throw validation_error("report", "missing metadata or rows");
    experiment_report rep;
    const auto& md = js["metadata"];
    if (md.contains("tool_version")) rep.tool_version = md["tool_version"].get<std::string>();
    if (md.contains("config_hash")) rep.config_hash = md["config_hash"].get<std::string>();
    if (!md.contains("config"))
        throw validation_error("report.metadata.config", "missing embedded config");
    rep.config = md["config"];
    for (const auto& e : js["rows"]) {
        report_row r;
        r.experiment = e.at("experiment").get<std::string>();
        r.n = e.at("n").get<std::int64_t>();
        r.quantity = e.at("quantity").get<std::string>();
        r.value_re = e.at("value_re").get<double>();
        r.value_im = e.at("value_im").get<double>();
        r.stderr_or_bound = e.at("stderr_or_bound").get<double>();
        r.target_re = e.at("target_re").get<double>();
        r.target_im = e.at("target_im").get<double>();
        r.holds = e.at("holds").get<bool>();
        r.seed = e.at("seed").get<std::uint64_t>();
        r.runtime_ms = e.at("runtime_ms").get<double>();
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

} // namespace szegolab
