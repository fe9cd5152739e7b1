#pragma once

#include <optional>
#include <string>

#include "equivar/potential.hpp"
#include "equivar/shooting.hpp"

namespace equivar {

inline constexpr const char* kVersion = "0.1.0";

/// Exit-code contract shared by every command:
///   0 success, 2 no solution exists, 3 potential fails conditions,
///   4 parse/IO/argument error, 5 solver failure.
enum ExitCode {
    kExitOk = 0,
    kExitNoSolution = 2,
    kExitConditionsFail = 3,
    kExitBadInput = 4,
    kExitSolverFailure = 5,
};

struct CliResult {
    int exit_code = 0;
    std::string report;  // deterministic JSON
    std::string csv;     // profile or sweep table, when produced
};

/// Parse a potential-spec JSON file ({"g": ..., "params": {...}, "G"?}).
PotentialSpec load_spec(const std::string& path);

/// Landau-Lifshitz template detection: structural match of g against
/// (omega + lambda*cos(x))*sin(x). Returns (lambda, omega) when matched.
std::optional<std::pair<double, double>> detect_ll(const PotentialSpec& spec);

/// Build the potential, routing through the closed forms when the spec
/// matches the Landau-Lifshitz template.
Potential build_from_spec(const PotentialSpec& spec);

CliResult run_validate(const std::string& spec_path);
CliResult run_criterion(const std::string& spec_path, int m);
CliResult run_solve(const std::string& spec_path, int m,
                    const ShootOptions& opts = {});
CliResult run_classify(const std::string& spec_path, int m, double a,
                       const ShootOptions& opts = {});
CliResult run_sweep(const std::string& template_path, const std::string& param,
                    double from, double to, int steps, int m, int threads = 0);

}  // namespace equivar
