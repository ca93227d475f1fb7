// szegolab CLI: run experiment configs, validate them, or replay single report
// rows. Exit code 0 means every "holds" column was true and no numeric errors
// occurred; 1 means a failed check or numeric error; 2 means bad input.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "szegolab/szegolab.hpp"

namespace {

namespace fs = std::filesystem;
using namespace szegolab;

std::string default_output_path(const fs::path& config_path, const std::string& format) {
    fs::path out = config_path;
    out.replace_extension("");
    out += ".report." + format;
    return out.string();
}

std::vector<fs::path> collect_configs(const std::string& arg) {
    const fs::path p(arg);
    if (fs::is_directory(p)) {
        std::vector<fs::path> found;
        for (const auto& entry : fs::directory_iterator(p)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
            // reports emitted into the config directory are not configs
            if (entry.path().stem().string().ends_with(".report")) continue;
            found.push_back(entry.path());
        }
        // deterministic batch order regardless of directory enumeration order
        std::sort(found.begin(), found.end());
        if (found.empty()) throw io_error(arg, "directory contains no .json configs");
        return found;
    }
    if (!fs::exists(p)) throw io_error(arg, "no such file or directory");
    return {p};
}

int cmd_run(const std::string& target, const std::string& format, int threads,
            std::optional<std::uint64_t> seed_override) {
    bool all_hold = true;
    for (const fs::path& cpath : collect_configs(target)) {
        experiment_config cfg = load_config(cpath.string());
        if (seed_override) cfg.mc.seed = *seed_override;
        const experiment_report rep = run_experiment(cfg, threads);
        const std::string out = cfg.output_path.empty()
                                    ? default_output_path(cpath, format)
                                    : cfg.output_path;
        emit_report(rep, format, out);
        std::size_t failed = 0;
        for (const auto& r : rep.rows)
            if (!r.holds) ++failed;
        all_hold = all_hold && failed == 0;
        std::printf("%s: %s rows=%zu %s -> %s\n", cpath.string().c_str(),
                    to_string(cfg.experiment), rep.rows.size(),
                    failed == 0 ? "all hold"
                                : (std::to_string(failed) + " failed").c_str(),
                    out.c_str());
    }
    return all_hold ? 0 : 1;
}

int cmd_validate(const std::string& path) {
    const experiment_config cfg = load_config(path);
    std::printf("%s: valid %s config, hash %s\n", path.c_str(), to_string(cfg.experiment),
                config_hash(cfg).c_str());
    return 0;
}

int cmd_replay(const std::string& path, std::size_t row, int threads) {
    const experiment_report rep = load_report(path);
    const replay_result rr = replay_row(rep, row, threads);
    std::printf("row %zu: %s n=%lld\n  original value=(%.17g, %.17g) holds=%s\n"
                "  replayed value=(%.17g, %.17g) holds=%s\n",
                row, rr.original.quantity.c_str(), static_cast<long long>(rr.original.n),
                rr.original.value_re, rr.original.value_im,
                rr.original.holds ? "true" : "false", rr.reran.value_re, rr.reran.value_im,
                rr.reran.holds ? "true" : "false");
    std::printf(rr.match ? "replay ok: bit-identical\n" : "replay MISMATCH\n");
    return rr.match ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"szegolab: a numerical laboratory for Toeplitz determinants with "
                 "size-dependent symbols and circular-ensemble statistics"};
    app.require_subcommand(1);

    std::string run_target, run_format = "csv";
    int run_threads = 1;
    std::uint64_t seed_value = 0;
    CLI::App* run = app.add_subcommand("run", "run one config file or a directory of configs");
    run->add_option("config", run_target, "config file or directory")->required();
    run->add_option("--format", run_format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--threads", run_threads, "worker threads (output is identical for any "
                                              "thread count)")
        ->check(CLI::PositiveNumber);
    CLI::Option* seed_opt =
        run->add_option("--seed", seed_value, "override the Monte Carlo seed");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("config", validate_path, "config file")->required();

    std::string replay_path;
    std::size_t replay_row_index = 0;
    int replay_threads = 1;
    CLI::App* replay = app.add_subcommand("replay", "re-run a single row of a JSON report");
    replay->add_option("report", replay_path, "JSON report file")->required();
    replay->add_option("--row", replay_row_index, "row index (0-based)")->required();
    replay->add_option("--threads", replay_threads, "worker threads")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (const char* cache = std::getenv("SZEGOLAB_CACHE_DIR"); cache && *cache)
        set_symbol_cache_dir(cache);

    try {
        if (run->parsed())
            return cmd_run(run_target, run_format, run_threads,
                           seed_opt->count() ? std::optional<std::uint64_t>(seed_value)
                                             : std::nullopt);
        if (validate->parsed()) return cmd_validate(validate_path);
        if (replay->parsed()) return cmd_replay(replay_path, replay_row_index, replay_threads);
    } catch (const validation_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 2;
    } catch (const truncation_error& e) {
        std::fprintf(stderr, "truncation error: %s\n", e.what());
        return 1;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 1;
    }
    return 2;
}
