#pragma once

#include <optional>
#include <string>

#include "equivar/analysis.hpp"
#include "equivar/integrate.hpp"
#include "equivar/potential.hpp"

namespace equivar {

enum class OutcomeKind { TypeI, Undershoot, Asymptotic, Indeterminate };

const char* to_string(OutcomeKind k);

/// Classification of a single shot. TypeI shots rise monotonically from 0
/// through pi at a finite radius; Undershoot shots stall (h' = 0) below
/// pi; Asymptotic shots approach pi without reaching it inside the
/// integration window; anything else is Indeterminate (usually: raise
/// r_max).
struct Outcome {
    OutcomeKind kind = OutcomeKind::Indeterminate;
    double r_a = 0.0;      // TypeI: first radius with h = pi
    double r_stall = 0.0;  // Undershoot: radius of the stall
    double h_stall = 0.0;  // Undershoot: h at the stall
    TailFit tail;          // Asymptotic: fit diagnostics
    double pi_minus_h_end = 0.0;
    std::string message;
    Trajectory trajectory;
};

struct ShootOptions {
    double r_max = 0.0;  // 0: default_r_max(p)
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double event_tol = 1e-10;
    double asym_tol = 1e-4;
    double series_tol = 1e-12;
    int series_max_iter = 200;
    double bisection_tol = 1e-10;  // relative
    double a_seed = 1.0;
    int expansion_budget = 60;
    int sweep_points = 16;
    int threads = 0;  // 0: machine parallelism
    bool allow_unvalidated = false;
    // densification for returned/diagnosed trajectories
    double record_max_dr = 1e-4;
    double record_tail_dr = 0.1;
};

/// Shoot from the origin with parameter a (series start + outward
/// integration) and classify the result.
Outcome classify(const Potential& p, int m, double a,
                 const ShootOptions& opts = {});

struct BvpDiagnostics {
    double pohozaev_max_rel = 0.0;
    double tail_rate = 0.0;
    double tail_rate_expected = 0.0;
    double tail_r_squared = 0.0;
    bool tail_fit_ok = false;
    bool monotone = false;        // h' > 0 and 0 < h < pi at all samples
    bool sweep_monotone = false;  // classification flips once over the sweep
    int band_crossings = 0;       // bracket-endpoint crossings in [xi, pi]
    double r_end = 0.0;
    long samples = 0;
};

/// The connecting orbit: shooting parameter at the boundary of the
/// monotone-crossing set, its bracket, and the trajectory integrated at
/// that parameter.
struct BvpSolution {
    double a_star = 0.0;
    double bracket_lo = 0.0;  // classified TypeI
    double bracket_hi = 0.0;  // classified not-TypeI
    Trajectory trajectory;
    BvpDiagnostics diagnostics;
};

struct FindResult {
    std::optional<BvpSolution> solution;
    std::string no_solution_reason;  // set when !solution
    CriterionValue criterion;

    bool has_solution() const { return solution.has_value(); }
};

/// Decide solvability by the criterion sign, then locate the boundary
/// shooting parameter by geometric bracketing and bisection. The bracket
/// is cross-validated with a classification sweep (the monotone structure
/// of the shot classes is not proven; violations are flagged, not hidden).
FindResult find_bvp_solution(const Potential& p, int m,
                             const ShootOptions& opts = {});

/// Boundary slope of the half-line problem from (s, xi): slopes above it
/// reach pi at finite radius, slopes below stall. Located by bisection;
/// approximates the initial slope of the unique half-line solution.
double slope_threshold_at(const Potential& p, int m, double s,
                          const ShootOptions& opts = {});

/// Sup distance between a shot with parameter a and the harmonic profile
/// with matched leading coefficient (scale lambda = (a/2)^(1/m)), taken
/// over lambda*r <= 3. Decreases as a grows.
double rescaled_harmonic_gap(const Potential& p, int m, double a,
                             const ShootOptions& opts = {});

/// Largest amount by which a shot exceeds the rescaled harmonic profile
/// matched at height xi, over the rise to xi. Negative values mean the
/// shot stays strictly below it.
double harmonic_comparison_gap(const Trajectory& t, const Potential& p, int m);

/// Number of crossings of two trajectories inside the band xi <= h <= pi,
/// counted on their common radius range. Monotone solutions can cross at
/// most once there.
int band_crossings(const Trajectory& t1, const Trajectory& t2, double xi);

}  // namespace equivar
