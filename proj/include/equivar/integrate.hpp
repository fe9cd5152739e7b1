#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "equivar/potential.hpp"
#include "equivar/series.hpp"

namespace equivar {

enum class TerminationKind { ReachedPi, SlopeZero, ExitedBelow, ReachedRmax };

const char* to_string(TerminationKind k);

struct TerminationEvent {
    TerminationKind kind = TerminationKind::ReachedRmax;
    double r_event = 0.0;
    double h = 0.0;
    double hprime = 0.0;
};

struct TrajectoryMeta {
    int m = 0;
    double a = 0.0;  // NaN for shots not launched from the origin series
    std::string potential_id;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    double event_tol = 0.0;
};

/// Sampled (r, h, h') path of one outward integration, ending at the first
/// event or at r_max. Radii are strictly increasing; the first sample is
/// the hand-off state.
struct Trajectory {
    std::vector<double> r;
    std::vector<double> h;
    std::vector<double> hprime;
    TerminationEvent termination;
    TrajectoryMeta meta;

    size_t size() const { return r.size(); }
};

struct IntegrateOptions {
    double r_max = 0.0;          // 0: use default_r_max(p)
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double event_tol = 1e-10;
    double below_margin = 1e-6;  // ExitedBelow fires at h = -below_margin
    // Optional sample densification (0 = record accepted steps only).
    // While h < pi - tail_threshold samples are emitted at most
    // record_max_dr apart; past it, at most record_tail_dr apart.
    double record_max_dr = 0.0;
    double record_tail_dr = 0.1;
    double tail_threshold = 1e-3;
    long max_steps = 4000000;
};

/// Right-hand side of the first-order system for (h, h').
///   dh = h', dh' = -h'/r + (m^2/r^2) sin h cos h + g(h)
void rhs(const Potential& p, int m, double r, double h, double hprime,
         double& dh, double& dhprime);

/// Several exponential-tail lengths; the window in which asymptotic
/// approach to pi is resolvable.
double default_r_max(const Potential& p);

/// Advance from state0 with an adaptive embedded Runge-Kutta 5(4) pair.
/// Events (h = pi upward crossing, h' = 0 crossing, h = -margin downward
/// crossing) are located on the dense output by bisection to event_tol.
Trajectory integrate(const Potential& p, int m, const InitialState& state0,
                     const IntegrateOptions& opts = {});

/// CSV export: header r,h,hprime, 17 significant digits.
void write_csv(const Trajectory& t, std::ostream& os);
void write_csv(const Trajectory& t, const std::string& path);

}  // namespace equivar
