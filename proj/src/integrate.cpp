/// Adaptive Dormand-Prince 5(4) integration of the radial profile equation
/// with dense output, event location, and optional sample densification.

#include "equivar/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace equivar {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct State {
    double h, v;
    State operator+(const State& o) const { return {h + o.h, v + o.v}; }
    State operator*(double s) const { return {h * s, v * s}; }
};
inline State operator*(double s, const State& y) { return y * s; }

// Dormand-Prince coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// 4th-order embedded weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output quintic coefficients
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct DenseSegment {
    double r0 = 0.0, dr = 0.0;
    State c1{}, c2{}, c3{}, c4{}, c5{};

    State eval(double r) const {
        const double th = (r - r0) / dr;
        const double th1 = 1.0 - th;
        return c1 + th * (c2 + th1 * (c3 + th * (c4 + th1 * c5)));
    }
};

struct Rhs {
    const Potential& p;
    int m;
    State operator()(double r, const State& y) const {
        State d;
        rhs(p, m, r, y.h, y.v, d.h, d.v);
        return d;
    }
};

// One DP5 step from (r, y) with FSAL derivative k1; fills y1, the error
// estimate, the dense segment, and k7 (the FSAL derivative at y1).
void dp5_step(const Rhs& f, double r, const State& y, const State& k1,
              double dr, State& y1, State& err, DenseSegment& dense,
              State& k7) {
    const State k2 = f(r + c2 * dr, y + dr * (a21 * k1));
    const State k3 = f(r + c3 * dr, y + dr * (a31 * k1 + a32 * k2));
    const State k4 = f(r + c4 * dr, y + dr * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 =
        f(r + c5 * dr, y + dr * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = f(
        r + dr, y + dr * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y1 = y + dr * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    k7 = f(r + dr, y1);
    err = dr * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const State ydiff = y1 + (-1.0) * y;
    const State bspl = dr * k1 + (-1.0) * ydiff;
    dense.r0 = r;
    dense.dr = dr;
    dense.c1 = y;
    dense.c2 = ydiff;
    dense.c3 = bspl;
    dense.c4 = ydiff + (-1.0) * (dr * k7) + (-1.0) * bspl;
    dense.c5 =
        dr * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
}

enum class EvKind { Pi, Slope, Below };

struct EventHit {
    EvKind kind;
    double r;
    State y;
};

// Bisect f's sign change in [ra, rb] on the dense segment. Returns the
// bracket's left end once the root is pinned to event_tol both in r and
// in the event function value.
template <class F>
void bisect_event(const DenseSegment& seg, const F& f, double ra, double rb,
                  double event_tol, double& r_out, State& y_out) {
    double fa = f(seg.eval(ra));
    for (int i = 0; i < 120; ++i) {
        const double rm = 0.5 * (ra + rb);
        const double fm = f(seg.eval(rm));
        if ((fa > 0.0) == (fm > 0.0)) {
            ra = rm;
            fa = fm;
        } else {
            rb = rm;
        }
        if (rb - ra <= event_tol && std::fabs(f(seg.eval(ra))) <= 0.25 * event_tol)
            break;
        if (rb - ra <= 1e-16 * std::max(1.0, std::fabs(ra))) break;
    }
    r_out = ra;
    y_out = seg.eval(ra);
}

}  // namespace

const char* to_string(TerminationKind k) {
    switch (k) {
        case TerminationKind::ReachedPi: return "reached_pi";
        case TerminationKind::SlopeZero: return "slope_zero";
        case TerminationKind::ExitedBelow: return "exited_below";
        case TerminationKind::ReachedRmax: return "reached_rmax";
    }
    return "?";
}

void rhs(const Potential& p, int m, double r, double h, double hprime,
         double& dh, double& dhprime) {
    dh = hprime;
    dhprime = -hprime / r +
              double(m) * m / (r * r) * std::sin(h) * std::cos(h) + p.g(h);
}

double default_r_max(const Potential& p) {
    const double gp = p.gprime_pi();
    if (gp > 0.0) return 100.0 * std::max(1.0, std::sqrt(2.0 / gp));
    return 100.0;
}

Trajectory integrate(const Potential& p, int m, const InitialState& state0,
                     const IntegrateOptions& opts) {
    if (!(state0.r0 > 0.0))
        throw std::invalid_argument("integrate: r0 must be positive");
    const double r_max = opts.r_max > 0.0 ? opts.r_max : default_r_max(p);
    if (!(r_max > state0.r0))
        throw std::invalid_argument("integrate: r_max must exceed r0");

    Trajectory traj;
    traj.meta.m = m;
    traj.meta.a = std::numeric_limits<double>::quiet_NaN();
    traj.meta.potential_id = p.id();
    traj.meta.rel_tol = opts.rel_tol;
    traj.meta.abs_tol = opts.abs_tol;
    traj.meta.event_tol = opts.event_tol;

    const Rhs f{p, m};
    double r = state0.r0;
    State y{state0.h, state0.hprime};
    State k1 = f(r, y);

    auto record = [&traj](double rr, const State& yy) {
        if (!traj.r.empty() && rr <= traj.r.back()) return;
        traj.r.push_back(rr);
        traj.h.push_back(yy.h);
        traj.hprime.push_back(yy.v);
    };
    record(r, y);

    double dr = 1e-3 * r;
    bool last_rejected = false;
    long steps = 0;

    while (r < r_max) {
        if (++steps > opts.max_steps)
            throw std::runtime_error("integrate: step budget exhausted");
        bool final_step = false;
        if (r + dr >= r_max) {
            dr = r_max - r;
            final_step = true;
        }
        if (dr < 1e-14 * std::max(1.0, r))
            throw std::runtime_error("integrate: step size underflow at r = " +
                                     std::to_string(r));

        State y1, errv, k7;
        DenseSegment dense;
        dp5_step(f, r, y, k1, dr, y1, errv, dense, k7);

        if (!std::isfinite(y1.h) || !std::isfinite(y1.v))
            throw std::runtime_error("integrate: non-finite state at r = " +
                                     std::to_string(r));

        const double sc_h =
            opts.abs_tol + opts.rel_tol * std::max(std::fabs(y.h), std::fabs(y1.h));
        const double sc_v =
            opts.abs_tol + opts.rel_tol * std::max(std::fabs(y.v), std::fabs(y1.v));
        const double eh = errv.h / sc_h, ev = errv.v / sc_v;
        const double err = std::sqrt(0.5 * (eh * eh + ev * ev));

        if (err > 1.0) {
            dr *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
            continue;
        }

        // scan the accepted step for event crossings on the dense output
        constexpr int kScan = 8;
        EventHit best{};
        bool have_event = false;
        double pi_r = 0.0, slope_r = 0.0, below_r = 0.0;
        bool have_pi = false, have_slope = false, have_below = false;
        State pi_y{}, slope_y{}, below_y{};
        {
            auto f_pi = [](const State& s) { return s.h - kPi; };
            auto f_sl = [](const State& s) { return s.v; };
            auto f_be = [&opts](const State& s) {
                return s.h + opts.below_margin;
            };
            double prev_rr = r;
            State prev_yy = y;
            for (int i = 1; i <= kScan; ++i) {
                const double rr = (i == kScan) ? r + dr : r + dr * i / kScan;
                const State yy = (i == kScan) ? y1 : dense.eval(rr);
                if (!have_pi && prev_yy.h < kPi && yy.h >= kPi) {
                    bisect_event(dense, f_pi, prev_rr, rr, opts.event_tol, pi_r,
                                 pi_y);
                    have_pi = true;
                }
                if (!have_slope && ((prev_yy.v > 0.0) != (yy.v > 0.0))) {
                    bisect_event(dense, f_sl, prev_rr, rr, opts.event_tol,
                                 slope_r, slope_y);
                    have_slope = true;
                }
                if (!have_below && prev_yy.h > -opts.below_margin &&
                    yy.h <= -opts.below_margin) {
                    bisect_event(dense, f_be, prev_rr, rr, opts.event_tol,
                                 below_r, below_y);
                    have_below = true;
                }
                prev_rr = rr;
                prev_yy = yy;
            }
        }
        if (have_pi || have_slope || have_below) {
            // grazing rule: a slope event at or before the pi crossing wins,
            // and a pi crossing without transversal h' > 0 reports as slope
            if (have_pi && have_slope && slope_r <= pi_r + opts.event_tol) {
                best = {EvKind::Slope, slope_r, slope_y};
            } else if (have_pi && pi_y.v > opts.event_tol) {
                best = {EvKind::Pi, pi_r, pi_y};
            } else if (have_pi) {
                best = {EvKind::Slope, pi_r, pi_y};
            } else if (have_slope &&
                       (!have_below || slope_r <= below_r)) {
                best = {EvKind::Slope, slope_r, slope_y};
            } else {
                best = {EvKind::Below, below_r, below_y};
            }
            have_event = true;
        }

        const double r_stop = have_event ? best.r : r + dr;

        // densified interior samples
        if (opts.record_max_dr > 0.0) {
            const double cap = (kPi - y.h > opts.tail_threshold)
                                   ? opts.record_max_dr
                                   : opts.record_tail_dr;
            double rr = traj.r.back() + cap;
            while (rr < r_stop) {
                record(rr, dense.eval(rr));
                rr += cap;
            }
        }

        if (have_event) {
            record(best.r, best.y);
            traj.termination.r_event = best.r;
            traj.termination.h = best.y.h;
            traj.termination.hprime = best.y.v;
            traj.termination.kind = best.kind == EvKind::Pi
                                        ? TerminationKind::ReachedPi
                                        : best.kind == EvKind::Slope
                                              ? TerminationKind::SlopeZero
                                              : TerminationKind::ExitedBelow;
            return traj;
        }

        record(r + dr, y1);
        r += dr;
        y = y1;
        k1 = k7;

        if (final_step) break;

        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        if (last_rejected) fac = std::min(fac, 1.0);
        dr *= std::clamp(fac, 0.2, 5.0);
        last_rejected = false;
    }

    traj.termination.kind = TerminationKind::ReachedRmax;
    traj.termination.r_event = traj.r.back();
    traj.termination.h = traj.h.back();
    traj.termination.hprime = traj.hprime.back();
    return traj;
}

void write_csv(const Trajectory& t, std::ostream& os) {
    os << "r,h,hprime\n";
    char buf[128];
    for (size_t i = 0; i < t.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t.r[i], t.h[i],
                      t.hprime[i]);
        os << buf;
    }
}

void write_csv(const Trajectory& t, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    write_csv(t, os);
}

}  // namespace equivar
