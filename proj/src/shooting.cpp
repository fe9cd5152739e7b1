/// Shot classification and bisection for the boundary shooting parameter.

#include "equivar/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "equivar/parallel.hpp"
#include "equivar/series.hpp"

namespace equivar {

namespace {

constexpr double kPi = 3.14159265358979323846;

IntegrateOptions integrate_opts(const ShootOptions& o, const Potential& p,
                                bool dense, double r_max_override = 0.0) {
    IntegrateOptions io;
    io.r_max = r_max_override > 0.0
                   ? r_max_override
                   : (o.r_max > 0.0 ? o.r_max : default_r_max(p));
    io.rel_tol = o.rel_tol;
    io.abs_tol = o.abs_tol;
    io.event_tol = o.event_tol;
    if (dense) {
        io.record_max_dr = o.record_max_dr;
        io.record_tail_dr = o.record_tail_dr;
    }
    return io;
}

bool r_hprime_decreasing_tail(const Trajectory& t) {
    // r*h' nonincreasing over the last decade of radius
    const double r_hi = t.r.back();
    const double r_lo = r_hi / 10.0;
    double prev = std::numeric_limits<double>::infinity();
    int checked = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t.r[i] < r_lo) continue;
        const double v = t.r[i] * t.hprime[i];
        if (v > prev * (1.0 + 1e-9) + 1e-14) return false;
        prev = v;
        ++checked;
    }
    return checked >= 2;
}

Outcome classify_trajectory(Trajectory&& traj, const ShootOptions& opts) {
    Outcome out;
    out.pi_minus_h_end = kPi - traj.h.back();
    switch (traj.termination.kind) {
        case TerminationKind::ReachedPi:
            out.kind = OutcomeKind::TypeI;
            out.r_a = traj.termination.r_event;
            break;
        case TerminationKind::SlopeZero:
            out.kind = OutcomeKind::Undershoot;
            out.r_stall = traj.termination.r_event;
            out.h_stall = traj.termination.h;
            break;
        case TerminationKind::ExitedBelow:
            out.kind = OutcomeKind::Indeterminate;
            out.message = "trajectory exited below 0";
            break;
        case TerminationKind::ReachedRmax: {
            const bool close = out.pi_minus_h_end < opts.asym_tol &&
                               out.pi_minus_h_end > 0.0;
            if (close && r_hprime_decreasing_tail(traj)) {
                out.kind = OutcomeKind::Asymptotic;
                try {
                    out.tail = tail_fit(traj);
                } catch (const std::exception&) {
                    // too few samples for a fit; the classification stands
                }
            } else {
                out.kind = OutcomeKind::Indeterminate;
                out.message = "no event before r_max; raise r_max";
            }
            break;
        }
    }
    out.trajectory = std::move(traj);
    return out;
}

Outcome shoot(const Potential& p, int m, double a, const ShootOptions& opts,
              bool dense, double r_max_override = 0.0) {
    const double delta = handoff_radius(p, m, a);
    LocalSeriesSolution ls =
        fixed_point_solve(p, m, a, delta, opts.series_tol, opts.series_max_iter);
    Trajectory traj = integrate(p, m, initial_state(ls),
                                integrate_opts(opts, p, dense, r_max_override));
    traj.meta.a = a;
    return classify_trajectory(std::move(traj), opts);
}

// TypeI or not, with one r_max retry on Indeterminate
bool is_type_one(const Potential& p, int m, double a, const ShootOptions& opts) {
    Outcome o = shoot(p, m, a, opts, /*dense=*/false);
    if (o.kind == OutcomeKind::Indeterminate) {
        const double base = opts.r_max > 0.0 ? opts.r_max : default_r_max(p);
        o = shoot(p, m, a, opts, false, 8.0 * base);
        if (o.kind == OutcomeKind::Indeterminate)
            throw std::runtime_error(
                "find_bvp_solution: classification indeterminate at a = " +
                std::to_string(a) + " (" + o.message + ")");
    }
    return o.kind == OutcomeKind::TypeI;
}

double interp_at(const Trajectory& t, double r) {
    auto it = std::lower_bound(t.r.begin(), t.r.end(), r);
    size_t k = size_t(it - t.r.begin());
    if (k == 0) return t.h.front();
    if (k >= t.size()) return t.h.back();
    const double w = (r - t.r[k - 1]) / (t.r[k] - t.r[k - 1]);
    return t.h[k - 1] + w * (t.h[k] - t.h[k - 1]);
}

}  // namespace

const char* to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::TypeI: return "type_i";
        case OutcomeKind::Undershoot: return "undershoot";
        case OutcomeKind::Asymptotic: return "asymptotic";
        case OutcomeKind::Indeterminate: return "indeterminate";
    }
    return "?";
}

Outcome classify(const Potential& p, int m, double a, const ShootOptions& opts) {
    if (!opts.allow_unvalidated && !p.report().ok)
        throw std::invalid_argument(
            "classify: potential fails conditions (i)-(iii); see its report");
    if (!(a > 0.0)) throw std::invalid_argument("classify: a must be positive");
    return shoot(p, m, a, opts, /*dense=*/false);
}

FindResult find_bvp_solution(const Potential& p, int m,
                             const ShootOptions& opts) {
    if (!opts.allow_unvalidated && !p.report().ok)
        throw std::invalid_argument(
            "find_bvp_solution: potential fails conditions (i)-(iii)");

    FindResult res;
    res.criterion = existence_criterion(p, m);
    if (res.criterion.kind == CriterionValue::Kind::Finite &&
        res.criterion.value <= 0.0) {
        res.no_solution_reason =
            "criterion nonpositive: every positive shot reaches pi at a "
            "finite radius, so no orbit connects 0 to pi";
        return res;
    }

    // geometric bracket around the TypeI / not-TypeI boundary
    double a_lo = 0.0, a_hi = 0.0;
    Trajectory traj_lo, traj_hi;  // bracket endpoints, for the band check
    {
        double a = opts.a_seed;
        const bool seed_type_one = is_type_one(p, m, a, opts);
        bool found = false;
        for (int k = 0; k < opts.expansion_budget; ++k) {
            const double a_next = seed_type_one ? a * 2.0 : a * 0.5;
            const bool t = is_type_one(p, m, a_next, opts);
            if (t != seed_type_one) {
                a_lo = seed_type_one ? a : a_next;
                a_hi = seed_type_one ? a_next : a;
                found = true;
                break;
            }
            a = a_next;
        }
        if (!found)
            throw std::runtime_error(
                "find_bvp_solution: no TypeI/Undershoot bracket within the "
                "expansion budget");
    }

    // cross-validate with a classification sweep around the bracket; the
    // TypeI set is proven open and bounded but not proven to be an
    // interval, so flips are located from the outermost TypeI seen
    bool sweep_monotone = true;
    {
        const int n = std::max(opts.sweep_points, 4);
        std::vector<double> as(n);
        std::vector<char> kinds(n);
        const double lo = a_lo / 4.0, hi = a_hi * 4.0;
        for (int i = 0; i < n; ++i)
            as[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
        parallel_for(n, opts.threads, [&](int i) {
            kinds[i] = is_type_one(p, m, as[i], opts) ? 1 : 0;
        });
        bool seen_not = false;
        for (int i = 0; i < n; ++i) {
            if (!kinds[i]) seen_not = true;
            if (kinds[i] && seen_not) sweep_monotone = false;
            if (kinds[i] && as[i] > a_lo && as[i] < a_hi) a_lo = as[i];
            if (!kinds[i] && as[i] < a_hi && as[i] > a_lo) a_hi = as[i];
        }
        if (!sweep_monotone) {
            // bisect the outermost boundary
            double outer_lo = 0.0;
            for (int i = 0; i < n; ++i)
                if (kinds[i]) outer_lo = std::max(outer_lo, as[i]);
            double outer_hi = std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i)
                if (!kinds[i] && as[i] > outer_lo)
                    outer_hi = std::min(outer_hi, as[i]);
            if (outer_lo > 0.0 && std::isfinite(outer_hi)) {
                a_lo = outer_lo;
                a_hi = outer_hi;
            }
        }
    }

    traj_lo = shoot(p, m, a_lo, opts, false).trajectory;
    traj_hi = shoot(p, m, a_hi, opts, false).trajectory;

    while (a_hi - a_lo >
           opts.bisection_tol * std::max(1.0, 0.5 * (a_lo + a_hi))) {
        const double mid = 0.5 * (a_lo + a_hi);
        if (mid <= a_lo || mid >= a_hi) break;  // double resolution reached
        if (is_type_one(p, m, mid, opts))
            a_lo = mid;
        else
            a_hi = mid;
    }

    BvpSolution sol;
    sol.a_star = 0.5 * (a_lo + a_hi);
    sol.bracket_lo = a_lo;
    sol.bracket_hi = a_hi;

    // final pass at a_star with a doubled window; if the leftover bracket
    // uncertainty fires an event first, re-integrate up to the radius where
    // the trajectory still hugs the orbit (a few tail lengths short of the
    // event) so the returned samples describe the connecting orbit
    const double base_rmax = opts.r_max > 0.0 ? opts.r_max : default_r_max(p);
    Outcome fin = shoot(p, m, sol.a_star, opts, /*dense=*/true, 2.0 * base_rmax);
    if (fin.kind != OutcomeKind::Asymptotic) {
        const double eps = std::sqrt(0.5 * std::max(p.gprime_pi(), 1e-12));
        const double r_trunc = fin.trajectory.termination.r_event - 3.5 / eps;
        if (r_trunc > 1.0) {
            fin = shoot(p, m, sol.a_star, opts, true, r_trunc);
        }
    }
    sol.trajectory = std::move(fin.trajectory);

    auto& d = sol.diagnostics;
    d.pohozaev_max_rel = pohozaev_residual(sol.trajectory, p, m).max_rel;
    d.tail_rate_expected = expected_tail_rate(p);
    try {
        const TailFit tf = tail_fit(sol.trajectory);
        d.tail_rate = tf.rate;
        d.tail_r_squared = tf.r_squared;
        d.tail_fit_ok = true;
    } catch (const std::exception&) {
        d.tail_fit_ok = false;
    }
    d.monotone = true;
    for (size_t i = 0; i < sol.trajectory.size(); ++i) {
        if (!(sol.trajectory.hprime[i] > 0.0) || !(sol.trajectory.h[i] > 0.0) ||
            !(sol.trajectory.h[i] < kPi)) {
            d.monotone = false;
            break;
        }
    }
    d.sweep_monotone = sweep_monotone;
    d.band_crossings = band_crossings(traj_lo, traj_hi, p.xi());
    d.r_end = sol.trajectory.r.back();
    d.samples = long(sol.trajectory.size());

    res.solution = std::move(sol);
    return res;
}

double slope_threshold_at(const Potential& p, int m, double s,
                          const ShootOptions& opts) {
    if (!opts.allow_unvalidated && !p.report().ok)
        throw std::invalid_argument(
            "slope_threshold_at: potential fails conditions (i)-(iii)");
    if (!(s > 0.0))
        throw std::invalid_argument("slope_threshold_at: s must be positive");

    const double xi = p.xi();
    const double base_rmax =
        std::max(opts.r_max > 0.0 ? opts.r_max : default_r_max(p), 2.0 * s);

    auto arrives = [&](double slope) {
        IntegrateOptions io = integrate_opts(opts, p, false, base_rmax);
        Trajectory t = integrate(p, m, InitialState{xi, slope, s}, io);
        return t.termination.kind == TerminationKind::ReachedPi;
    };

    // first-integral lower bound for the boundary slope
    const double bound =
        std::sqrt(std::max(double(m) * m * std::sin(xi) * std::sin(xi) +
                               2.0 * p.eval_G(xi) * s * s,
                           0.0)) / s;
    double lo = bound;
    if (arrives(lo)) {
        // should not happen; fall back to a downward search
        for (int k = 0; k < opts.expansion_budget && arrives(lo); ++k) lo *= 0.5;
        if (arrives(lo))
            throw std::runtime_error("slope_threshold_at: no lower bracket");
    }
    double hi = std::max(2.0 * bound, 1e-3);
    bool found = false;
    for (int k = 0; k < opts.expansion_budget; ++k) {
        if (arrives(hi)) {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if (!found)
        throw std::runtime_error("slope_threshold_at: no arrival bracket");

    while (hi - lo > opts.bisection_tol * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (arrives(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double rescaled_harmonic_gap(const Potential& p, int m, double a,
                             const ShootOptions& opts) {
    const double lambda = std::pow(0.5 * a, 1.0 / m);
    const double r_max = 3.0 / lambda;
    ShootOptions o = opts;
    o.record_max_dr = r_max / 4000.0;
    o.record_tail_dr = o.record_max_dr;
    Outcome out = shoot(p, m, a, o, /*dense=*/true, r_max);
    double sup = 0.0;
    for (size_t i = 0; i < out.trajectory.size(); ++i) {
        const double diff = std::fabs(out.trajectory.h[i] -
                                      harmonic_profile(m, lambda,
                                                       out.trajectory.r[i]));
        sup = std::max(sup, diff);
    }
    return sup;
}

double harmonic_comparison_gap(const Trajectory& t, const Potential& p, int m) {
    const double xi = p.xi();
    // first crossing of xi
    size_t k = 0;
    while (k < t.size() && t.h[k] < xi) ++k;
    if (k == 0 || k >= t.size())
        throw std::invalid_argument(
            "harmonic_comparison_gap: trajectory never rises to xi");
    const double w = (xi - t.h[k - 1]) / (t.h[k] - t.h[k - 1]);
    const double s_a = t.r[k - 1] + w * (t.r[k] - t.r[k - 1]);
    const double r_xi = std::pow(std::tan(0.5 * xi), 1.0 / m);
    double gap = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < t.size() && t.r[i] < s_a; ++i) {
        const double phi = harmonic_profile(m, r_xi / s_a, t.r[i]);
        gap = std::max(gap, t.h[i] - phi);
    }
    return gap;
}

int band_crossings(const Trajectory& t1, const Trajectory& t2, double xi) {
    const double lo = std::max(t1.r.front(), t2.r.front());
    const double hi = std::min(t1.r.back(), t2.r.back());
    if (!(hi > lo)) return 0;
    int crossings = 0;
    int sign = 0;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        const double r = lo + (hi - lo) * double(i) / n;
        const double h1 = interp_at(t1, r), h2 = interp_at(t2, r);
        if (h1 < xi || h2 < xi || h1 > kPi || h2 > kPi) continue;
        const double diff = h1 - h2;
        if (std::fabs(diff) < 1e-12) continue;
        const int s = diff > 0.0 ? 1 : -1;
        if (sign != 0 && s != sign) ++crossings;
        sign = s;
    }
    return crossings;
}

}  // namespace equivar
