/// Fixed-point construction of the series correction at the singular origin.
///
/// Substituting h = a*r^m + r^(m+2)*phi into the radial integral form of
/// the profile equation gives phi = T(phi) with
///
///   T(phi)(r) = r^-(m+2) * { Int_0^r (1/s) Int_0^s F(t) dt ds - a*r^m },
///   F(t) = (m^2/(2t)) * sin(2*h(t)) + g(h(t))*t.
///
/// Two exact rewrites keep the evaluation well conditioned:
///  * the singular part m^2*a*t^(m-1) of F integrates to exactly a*r^m
///    through the double integral, so it is subtracted inside the
///    integrand (Ftilde) instead of cancelling a*r^m at the end;
///  * the double integral of Ftilde collapses by Fubini to a single
///    integral with a log kernel:
///      Int_0^r Ftilde(t)*ln(r/t) dt = ln(r)*I(r) - L(r),
///    with I, L cumulative integrals of Ftilde and Ftilde*ln(t).

#include "equivar/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "equivar/quadrature.hpp"

namespace equivar {

namespace {

// sin(z) - z without cancellation for small z
double sin_minus_id(double z) {
    if (std::fabs(z) < 1e-2) {
        const double z2 = z * z;
        return -z * z2 / 6.0 * (1.0 - z2 / 20.0 * (1.0 - z2 / 42.0));
    }
    return std::sin(z) - z;
}

struct GradedGrid {
    std::vector<double> r;
    static GradedGrid make(double delta, int n) {
        GradedGrid g;
        g.r.resize(n + 1);
        for (int j = 0; j <= n; ++j)
            g.r[j] = delta * std::pow(double(j) / n, 1.5);
        g.r[n] = delta;
        return g;
    }
};

// 4-point Lagrange interpolation on a sorted grid
double interp_cubic(const std::vector<double>& xs, const std::vector<double>& ys,
                    double x) {
    const int n = int(xs.size());
    int k = int(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    k = std::clamp(k, 0, n - 2);
    int j0 = std::clamp(k - 1, 0, n - 4);
    double result = 0.0;
    for (int i = j0; i < j0 + 4; ++i) {
        double li = 1.0;
        for (int j = j0; j < j0 + 4; ++j) {
            if (j == i) continue;
            li *= (x - xs[j]) / (xs[i] - xs[j]);
        }
        result += li * ys[i];
    }
    return result;
}

// Regularized integrand: F(t) with the m^2*a*t^(m-1) part removed.
//   Ftilde(t) = (m^2/(2t)) * (sin(2h) - 2*a*t^m) + g(h)*t
// The parenthesis is evaluated via the angle-sum split
//   sin(2u+2w) - 2u = (sin 2u - 2u) - 2*sin(2u)*sin^2(w) + cos(2u)*sin(2w)
// with u = a*t^m, w = t^(m+2)*phi(t), so no large terms cancel.
struct FtildeEval {
    const Potential& p;
    int m;
    double a;
    const std::vector<double>& grid;
    const std::vector<double>& phi;

    double operator()(double t) const {
        const double tm = std::pow(t, m);
        const double u = a * tm;
        const double w = tm * t * t * interp_cubic(grid, phi, t);
        const double h = u + w;
        const double sin2u = std::sin(2.0 * u);
        const double cos2u = std::cos(2.0 * u);
        const double sw = std::sin(w);
        const double dsin = sin_minus_id(2.0 * u) - 2.0 * sin2u * sw * sw +
                            cos2u * std::sin(2.0 * w);
        return 0.5 * m * m * dsin / t + p.g(h) * t;
    }
};

// Per-cell Gauss-Legendre accumulation of Ftilde and Ftilde*ln(t).
void accumulate_cell(const FtildeEval& f, double a, double b, double& sumI,
                     double& sumL) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < 7; ++i) {
        const double t = c + h * gl7_nodes[i];
        const double w = h * gl7_weights[i];
        const double v = f(t);
        sumI += w * v;
        sumL += w * v * std::log(t);
    }
}

// Cumulative integrals of Ftilde (and Ftilde*ln t) at the grid nodes.
// The first cell is subdivided dyadically toward 0: the integrand is only
// O(t^(m+1)) there and the log weight needs the refinement.
void cumulative_integrals(const FtildeEval& f, const std::vector<double>& r,
                          std::vector<double>& I, std::vector<double>& L) {
    const int n = int(r.size()) - 1;
    I.assign(n + 1, 0.0);
    L.assign(n + 1, 0.0);
    double cI = 0.0, cL = 0.0;
    {
        const double r1 = r[1];
        for (int k = 27; k >= 0; --k)
            accumulate_cell(f, r1 * std::ldexp(1.0, -k - 1),
                            r1 * std::ldexp(1.0, -k), cI, cL);
        I[1] = cI;
        L[1] = cL;
    }
    for (int j = 1; j < n; ++j) {
        accumulate_cell(f, r[j], r[j + 1], cI, cL);
        I[j + 1] = cI;
        L[j + 1] = cL;
    }
}

// r -> 0 limit of T(phi): the order-r^(m+1) balance of the integrand.
double limit_value(int m, double a, double gprime0, double phi0) {
    if (m == 1) return (phi0 - 2.0 / 3.0 * a * a * a + gprime0 * a) / 9.0;
    const double mp2 = double(m + 2);
    return (double(m) * m * phi0 + gprime0 * a) / (mp2 * mp2);
}

double kappa_of(int m, double C1, double delta) {
    const double mp2 = double(m + 2), mp4 = double(m + 4);
    return double(m) * m / (mp2 * mp2) + C1 * delta * delta / (mp4 * mp4);
}

void apply_T(const Potential& p, int m, double a,
             const std::vector<double>& grid, const std::vector<double>& phi,
             std::vector<double>& out, std::vector<double>& inner) {
    const int n = int(grid.size()) - 1;
    FtildeEval f{p, m, a, grid, phi};
    std::vector<double> L;
    cumulative_integrals(f, grid, inner, L);
    out.assign(n + 1, 0.0);
    out[0] = limit_value(m, a, p.gprime_0(), phi[0]);
    for (int j = 1; j <= n; ++j) {
        const double r = grid[j];
        out[j] = (std::log(r) * inner[j] - L[j]) / std::pow(r, m + 2);
    }
}

}  // namespace

double choose_delta(int m, double C1_bound, double kappa_max) {
    if (m < 1) throw std::invalid_argument("choose_delta: m must be positive");
    const double mp2 = double(m + 2), mp4 = double(m + 4);
    const double base = double(m) * m / (mp2 * mp2);
    if (!(kappa_max > base && kappa_max < 1.0))
        throw std::invalid_argument(
            "choose_delta: kappa_max must lie in (m^2/(m+2)^2, 1)");
    if (C1_bound < 0.0)
        throw std::invalid_argument("choose_delta: C1_bound must be nonnegative");
    if (C1_bound == 0.0) return 1.0;
    return std::min(1.0, std::sqrt((kappa_max - base) * mp4 * mp4 / C1_bound));
}

double handoff_radius(const Potential& p, int m, double a, double kappa_max) {
    double delta = choose_delta(m, p.c1_bound(), kappa_max);
    const double aa = std::fabs(a);
    if (aa > 0.0)
        delta = std::min(delta, std::pow(0.4 / aa, 1.0 / m));
    return delta;
}

LocalSeriesSolution fixed_point_solve(const Potential& p, int m, double a,
                                      double delta, double tol, int max_iter,
                                      int n_grid) {
    if (m < 1) throw std::invalid_argument("fixed_point_solve: m must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("fixed_point_solve: delta <= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("fixed_point_solve: tol <= 0");
    const double kappa = kappa_of(m, p.c1_bound(), delta);
    if (kappa >= 1.0)
        throw std::invalid_argument(
            "fixed_point_solve: delta too large, correction map not contractive");

    LocalSeriesSolution ls;
    ls.m = m;
    ls.a = a;
    ls.delta = delta;
    ls.contraction_kappa = kappa;
    ls.grid = GradedGrid::make(delta, n_grid).r;
    ls.phi.assign(n_grid + 1, 0.0);

    const double stop = tol * std::min(1.0, (1.0 - kappa) / std::max(kappa, 1e-30));
    std::vector<double> next, inner;
    bool converged = false;
    for (int it = 1; it <= max_iter; ++it) {
        apply_T(p, m, a, ls.grid, ls.phi, next, inner);
        double diff = 0.0;
        for (size_t j = 0; j < next.size(); ++j)
            diff = std::max(diff, std::fabs(next[j] - ls.phi[j]));
        ls.phi.swap(next);
        ls.iterations = it;
        if (diff <= stop) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw std::runtime_error(
            "fixed_point_solve: no convergence within max_iter (delta too "
            "large for this potential?)");

    // refresh the cumulative integral at the converged correction
    apply_T(p, m, a, ls.grid, ls.phi, next, inner);
    ls.inner = inner;
    ls.h_delta = a * std::pow(delta, m) +
                 std::pow(delta, m + 2) * ls.phi.back();
    ls.hprime_delta =
        m * a * std::pow(delta, m - 1) + ls.inner.back() / delta;
    return ls;
}

double LocalSeriesSolution::phi_at(double r) const {
    return interp_cubic(grid, phi, r);
}

double LocalSeriesSolution::h_at(double r) const {
    if (r == 0.0) return 0.0;
    return a * std::pow(r, m) + std::pow(r, m + 2) * phi_at(r);
}

double LocalSeriesSolution::hprime_at(const Potential& p, double r) const {
    if (!(r > 0.0 && r <= delta * (1.0 + 1e-12)))
        throw std::domain_error("hprime_at: r outside (0, delta]");
    // cumulative integral at the nearest grid node below r, then a
    // Gauss-Legendre hop for the remainder
    const int n = int(grid.size()) - 1;
    int k = int(std::upper_bound(grid.begin(), grid.end(), r) - grid.begin()) - 1;
    k = std::clamp(k, 0, n);
    double I = inner[k];
    if (r > grid[k]) {
        FtildeEval f{p, m, a, grid, phi};
        double dummyL = 0.0;
        accumulate_cell(f, grid[k], r, I, dummyL);
    }
    return m * a * std::pow(r, m - 1) + I / r;
}

InitialState initial_state(const LocalSeriesSolution& ls) {
    return InitialState{ls.h_delta, ls.hprime_delta, ls.delta};
}

double fixed_point_residual(const Potential& p, const LocalSeriesSolution& ls) {
    std::vector<double> next, inner;
    apply_T(p, ls.m, ls.a, ls.grid, ls.phi, next, inner);
    double res = 0.0;
    for (size_t j = 0; j < next.size(); ++j)
        res = std::max(res, std::fabs(next[j] - ls.phi[j]));
    return res;
}

double ode_residual_at_handoff(const Potential& p,
                               const LocalSeriesSolution& ls) {
    const double r = ls.delta;
    const double s = 0.01 * r;
    // one-sided five-point first derivative of h' at delta (fourth order)
    double fp[5];
    for (int k = 0; k < 5; ++k) fp[k] = ls.hprime_at(p, r - k * s);
    const double hsecond =
        (25.0 / 12.0 * fp[0] - 4.0 * fp[1] + 3.0 * fp[2] - 4.0 / 3.0 * fp[3] +
         0.25 * fp[4]) / s;
    const double h = ls.h_delta;
    const double hp = ls.hprime_delta;
    const double curv = double(ls.m) * ls.m / (r * r) * std::sin(h) * std::cos(h);
    const double res = hsecond + hp / r - curv - p.g(h);
    const double scale = std::max({1.0, std::fabs(hsecond), std::fabs(hp / r),
                                   std::fabs(curv), std::fabs(p.g(h))});
    return std::fabs(res) / scale;
}

}  // namespace equivar
