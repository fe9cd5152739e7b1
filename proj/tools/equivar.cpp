/// Command-line front end: validate potentials, evaluate the solvability
/// criterion, solve the connecting-orbit problem, classify single shots,
/// and sweep a parameter.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "equivar/cli_core.hpp"

namespace {

void write_file_or_die(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        std::cerr << "cannot write " << path << "\n";
        std::exit(equivar::kExitBadInput);
    }
    os << content;
}

int finish(const equivar::CliResult& result, const std::string& out_report,
           const std::string& out_csv,
           std::chrono::steady_clock::time_point t0) {
    if (!result.report.empty()) {
        std::cout << result.report;
        if (!out_report.empty()) write_file_or_die(out_report, result.report);
    }
    if (!out_csv.empty() && !result.csv.empty())
        write_file_or_die(out_csv, result.csv);
    const auto dt = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::fprintf(stderr, "elapsed: %.3f s\n", dt);
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"equivariant profile solver"};
    app.require_subcommand(1);

    std::string spec_path, out_report, out_profile, out_csv, param;
    int m = 2;
    double a = 1.0;
    double from = 0.0, to = 1.0;
    int steps = 1, threads = 0;
    equivar::ShootOptions opts;

    auto* validate = app.add_subcommand("validate", "check conditions (i)-(iii)");
    validate->add_option("spec", spec_path, "potential spec JSON")->required();
    validate->add_option("--out-report", out_report, "write the report here too");

    auto* criterion =
        app.add_subcommand("criterion", "evaluate the solvability integral");
    criterion->add_option("spec", spec_path)->required();
    criterion->add_option("--m", m, "equivariance degree")->required();
    criterion->add_option("--out-report", out_report);

    auto* solve = app.add_subcommand("solve", "locate the connecting orbit");
    solve->add_option("spec", spec_path)->required();
    solve->add_option("--m", m)->required();
    solve->add_option("--rmax", opts.r_max, "integration window");
    solve->add_option("--tol", opts.rel_tol, "step tolerance (relative)");
    solve->add_option("--out-profile", out_profile, "trajectory CSV path");
    solve->add_option("--out-report", out_report, "report JSON path");

    auto* classify = app.add_subcommand("classify", "classify a single shot");
    classify->add_option("spec", spec_path)->required();
    classify->add_option("--m", m)->required();
    classify->add_option("--a", a, "shooting parameter")->required();
    classify->add_option("--rmax", opts.r_max);
    classify->add_option("--out-report", out_report);

    auto* sweep = app.add_subcommand("sweep", "sweep one spec parameter");
    sweep->add_option("template", spec_path, "spec template JSON")->required();
    sweep->add_option("--param", param, "parameter name to sweep")->required();
    sweep->add_option("--from", from)->required();
    sweep->add_option("--to", to)->required();
    sweep->add_option("--steps", steps)->required();
    sweep->add_option("--m", m)->required();
    sweep->add_option("--threads", threads, "worker pool size");
    sweep->add_option("--out-csv", out_csv, "sweep table CSV path");
    sweep->add_option("--out-report", out_report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : equivar::kExitBadInput;
    }

    const auto t0 = std::chrono::steady_clock::now();
    equivar::CliResult result;
    if (*validate) {
        result = equivar::run_validate(spec_path);
    } else if (*criterion) {
        result = equivar::run_criterion(spec_path, m);
    } else if (*solve) {
        result = equivar::run_solve(spec_path, m, opts);
        if (!out_profile.empty() && !result.csv.empty())
            write_file_or_die(out_profile, result.csv);
    } else if (*classify) {
        result = equivar::run_classify(spec_path, m, a, opts);
    } else if (*sweep) {
        result = equivar::run_sweep(spec_path, param, from, to, steps, m,
                                    threads);
    }
    return finish(result, out_report, out_csv, t0);
}
