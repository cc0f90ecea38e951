#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dstirap/oracles.hpp"
#include "dstirap/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string outdir = ".";
    std::string format = "both";
    double zero_tol = -1.0;
    double rtol = -1.0;
    double atol = -1.0;
    double adiabaticity_threshold = -1.0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("-o,--output-dir", opts.outdir, "Directory for result files");
    cmd->add_option("--format", opts.format, "Output format: json, csv or both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    cmd->add_option("--zero-tol", opts.zero_tol,
                    "Relative threshold for vanishing singular values");
    cmd->add_option("--rtol", opts.rtol, "Integrator relative tolerance");
    cmd->add_option("--atol", opts.atol, "Integrator absolute tolerance");
    cmd->add_option("--adiabaticity-threshold", opts.adiabaticity_threshold,
                    "Reporting threshold for the nonadiabatic coupling ratios");
}

dstirap::OutputFormat parse_format(const std::string& format) {
    if (format == "json") return dstirap::OutputFormat::Json;
    if (format == "csv") return dstirap::OutputFormat::Csv;
    return dstirap::OutputFormat::Both;
}

dstirap::Scenario load_with_overrides(const std::string& path, const CommonOptions& opts) {
    dstirap::Scenario scenario = dstirap::load_scenario(path);
    if (opts.zero_tol > 0.0) scenario.zero_tol = opts.zero_tol;
    if (opts.rtol > 0.0) scenario.integrator.rtol = opts.rtol;
    if (opts.atol > 0.0) scenario.integrator.atol = opts.atol;
    if (opts.adiabaticity_threshold > 0.0) {
        scenario.adiabaticity_threshold = opts.adiabaticity_threshold;
    }
    return scenario;
}

int run_one(const std::string& path, const CommonOptions& opts, bool analyze_only,
            std::mutex* log_mutex = nullptr) {
    const auto log = [&](const std::string& line) {
        if (log_mutex) {
            std::scoped_lock lock(*log_mutex);
            std::cout << line << "\n";
        } else {
            std::cout << line << "\n";
        }
    };
    try {
        const auto scenario = load_with_overrides(path, opts);
        std::vector<std::string> files;
        if (analyze_only) {
            const auto analysis = dstirap::analyze_scenario(scenario);
            files = dstirap::write_analysis_outputs(scenario, analysis, opts.outdir,
                                                    parse_format(opts.format));
            log(scenario.name + ": " + dstirap::to_string(analysis.verdict.verdict) +
                (analysis.verdict.notes.empty() ? "" : " (" + analysis.verdict.notes + ")"));
        } else {
            const auto result = dstirap::run_scenario(scenario);
            files = dstirap::write_run_outputs(scenario, result, opts.outdir,
                                               parse_format(opts.format));
            const auto& final_pops = result.trajectory.populations.back();
            char line[256];
            std::snprintf(line, sizeof(line),
                          "%s: final populations g=%.6f e=%.6f f=%.6f (norm drift %.2e)",
                          scenario.name.c_str(), final_pops.g, final_pops.e, final_pops.f,
                          result.trajectory.norm_drift());
            log(line);
        }
        for (const auto& f : files) log("  wrote " + f);
        return kExitOk;
    } catch (const dstirap::ScenarioError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return kExitNumerical;
    }
}

int run_sweep(const std::vector<std::string>& paths, const CommonOptions& opts,
              unsigned jobs) {
    std::atomic<std::size_t> next{0};
    std::atomic<int> severity{kExitOk};
    std::mutex log_mutex;
    const unsigned workers =
        std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(paths.size())));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < paths.size();
                 i = next.fetch_add(1)) {
                const int status = run_one(paths[i], opts, false, &log_mutex);
                int expected = severity.load();
                while (status > expected &&
                       !severity.compare_exchange_weak(expected, status)) {
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    return severity.load();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Degenerate-manifold STIRAP analysis and propagation"};
    app.require_subcommand(1);

    CommonOptions analyze_opts, run_opts, sweep_opts;
    std::string analyze_path, run_path;
    std::vector<std::string> sweep_paths;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    int oracle_grid = 100;

    auto* analyze = app.add_subcommand(
        "analyze", "Feasibility and Morris-Shore report without propagation");
    analyze->add_option("scenario", analyze_path, "Scenario file")->required();
    add_common(analyze, analyze_opts);

    auto* run = app.add_subcommand("run", "Full analysis plus time propagation");
    run->add_option("scenario", run_path, "Scenario file")->required();
    add_common(run, run_opts);

    auto* sweep = app.add_subcommand("sweep", "Run several scenarios concurrently");
    sweep->add_option("scenarios", sweep_paths, "Scenario files")->required();
    sweep->add_option("-j,--jobs", jobs, "Worker thread count");
    add_common(sweep, sweep_opts);

    auto* oracle = app.add_subcommand(
        "oracle-check", "Cross-validate the closed-form results against the numeric path");
    oracle->add_option("--grid", oracle_grid, "Polarization-angle grid size")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (analyze->parsed()) return run_one(analyze_path, analyze_opts, true);
    if (run->parsed()) return run_one(run_path, run_opts, false);
    if (sweep->parsed()) return run_sweep(sweep_paths, sweep_opts, jobs);
    if (oracle->parsed()) {
        const auto report = dstirap::oracles::self_check(oracle_grid);
        for (const auto& line : report.lines) {
            std::printf("[%s] %s (worst %.3e, tol %.1e)\n", line.pass ? "PASS" : "FAIL",
                        line.name.c_str(), line.worst, line.tolerance);
        }
        return report.all_pass ? kExitOk : kExitNumerical;
    }
    return kExitUsage;
}
