#include "equivar/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "equivar/expr.hpp"
#include "equivar/quadrature.hpp"

namespace equivar {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDerivStep = 1e-5;
constexpr int kChebNodes = 256;

std::string format_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Reduce x to [0, pi] under the odd reflection group generated by
// x -> -x and x -> 2*pi - x; sign picks up -1 on the odd copies.
double reduce_odd(double x, double& sign) {
    sign = 1.0;
    x = std::remainder(x, 2.0 * kPi);  // now in [-pi, pi]
    if (x < 0.0) {
        x = -x;
        sign = -1.0;
    }
    return x;
}

double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double fa, double tol) {
    for (int i = 0; i < 200 && (b - a) > tol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa > 0.0) == (fm > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double Potential::g(double x) const {
    double sign;
    const double y = reduce_odd(x, sign);
    return sign * g_base_(y);
}

double Potential::eval_G(double x) const {
    if (x < -1e-12 || x > kPi + 1e-12)
        throw std::domain_error("eval_G: x outside [0, pi]");
    x = std::clamp(x, 0.0, kPi);
    if (G_closed_) return G_closed_(x);
    // barycentric interpolation on the Chebyshev cache
    const size_t n = cheb_x_.size();
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < n; ++k) {
        double d = x - cheb_x_[k];
        if (d == 0.0) return cheb_G_[k];
        double w = (k % 2 == 0) ? 1.0 : -1.0;
        if (k == 0 || k == n - 1) w *= 0.5;
        w /= d;
        num += w * cheb_G_[k];
        den += w;
    }
    return num / den;
}

double Potential::G_ext(double x) const {
    double sign;
    const double y = reduce_odd(x, sign);
    return eval_G(y);
}

double Potential::G_near_pi(double u) const {
    return 0.5 * gprime_pi_ * u * u - gsecond_pi_ / 6.0 * u * u * u;
}

void Potential::finish_build(int n_grid, double tol_root, bool closed_forms) {
    auto& rep = report_;

    // sample scale
    double scale = 0.0;
    std::vector<double> gx(n_grid + 1), gv(n_grid + 1);
    for (int i = 0; i <= n_grid; ++i) {
        gx[i] = kPi * double(i) / n_grid;
        gv[i] = g_base_(gx[i]);
        scale = std::max(scale, std::fabs(gv[i]));
    }
    const double tol_end = 1e-9 * std::max(1.0, scale);
    const double tol_sign = 1e-12 * std::max(1.0, scale);

    if (std::fabs(gv[0]) > tol_end) {
        rep.messages.push_back("g(0) = " + format_g(gv[0]) + " is not zero");
    }
    if (std::fabs(gv[n_grid]) > tol_end) {
        rep.messages.push_back("g(pi) = " + format_g(gv[n_grid]) + " is not zero");
    }
    const bool endpoints_ok =
        std::fabs(gv[0]) <= tol_end && std::fabs(gv[n_grid]) <= tol_end;

    // interior roots by sign-change bracketing + bisection
    rep.zeros_found.clear();
    for (int i = 1; i < n_grid; ++i) {
        if (gv[i] == 0.0) {
            rep.zeros_found.push_back(gx[i]);
            continue;
        }
        if (i + 1 <= n_grid && gv[i] * gv[i + 1] < 0.0 && i + 1 < n_grid + 1) {
            const double r = bisect_root(g_base_, gx[i], gx[i + 1], gv[i], tol_root);
            if (r > tol_end && r < kPi - tol_end) rep.zeros_found.push_back(r);
        }
    }
    // drop near-duplicate roots (exact grid zeros next to a bracket)
    std::sort(rep.zeros_found.begin(), rep.zeros_found.end());
    rep.zeros_found.erase(
        std::unique(rep.zeros_found.begin(), rep.zeros_found.end(),
                    [](double a, double b) { return std::fabs(a - b) < 1e-9; }),
        rep.zeros_found.end());

    bool one_zero = rep.zeros_found.size() == 1;
    if (has_closed_xi_) {
        // closed-form xi was registered; trust it when valid
        one_zero = xi_ > 0.0 && xi_ < kPi;
    } else if (one_zero) {
        xi_ = rep.zeros_found[0];
    }
    rep.xi = one_zero ? xi_ : std::numeric_limits<double>::quiet_NaN();
    if (rep.zeros_found.empty())
        rep.messages.push_back("no sign change of g in (0, pi): condition (i) fails");
    else if (rep.zeros_found.size() > 1)
        rep.messages.push_back(std::to_string(rep.zeros_found.size()) +
                               " interior zeros found; condition (i) needs exactly one");

    // sign pattern on the grid, one-cell margin around 0, xi, pi
    rep.sign_violations.clear();
    if (one_zero) {
        const double margin = kPi / n_grid * 1.5;
        for (int i = 1; i < n_grid; ++i) {
            const double x = gx[i];
            if (x > margin && x < xi_ - margin && gv[i] < -tol_sign)
                rep.sign_violations.emplace_back(x, gv[i]);
            if (x > xi_ + margin && x < kPi - margin && gv[i] > tol_sign)
                rep.sign_violations.emplace_back(x, gv[i]);
        }
        if (!rep.sign_violations.empty())
            rep.messages.push_back("sign pattern of condition (i) fails at " +
                                   std::to_string(rep.sign_violations.size()) +
                                   " sample points");
    }

    if (!closed_forms) {
        rep.integral_g =
            integrate_adaptive([this](double t) { return g_base_(t); }, 0.0, kPi)
                .value;
        gprime_pi_ = (g(kPi + kDerivStep) - g(kPi - kDerivStep)) / (2.0 * kDerivStep);
        gprime_0_ = (g(kDerivStep) - g(-kDerivStep)) / (2.0 * kDerivStep);
        // one-sided g''(pi) from inside the strip (second order)
        {
            const double h = 1e-4;
            gsecond_pi_ = (2.0 * g_base_(kPi) - 5.0 * g_base_(kPi - h) +
                           4.0 * g_base_(kPi - 2 * h) - g_base_(kPi - 3 * h)) /
                          (h * h);
        }
    }
    rep.gprime_pi = gprime_pi_;
    rep.gprime_0 = gprime_0_;
    if (rep.integral_g <= 1e-12 * std::max(1.0, scale))
        rep.messages.push_back("integral of g over [0,pi] = " +
                               format_g(rep.integral_g) +
                               " is not positive: condition (ii) fails");
    if (gprime_pi_ <= 0.0)
        rep.messages.push_back("g'(pi) = " + format_g(gprime_pi_) +
                               " is not positive: condition (iii) fails");

    const bool sampled_ok = endpoints_ok && one_zero &&
                            rep.sign_violations.empty() &&
                            rep.integral_g > 1e-12 * std::max(1.0, scale) &&
                            gprime_pi_ > 0.0;
    rep.ok = sampled_ok;

    // G: quadrature cache on a Chebyshev-Lobatto grid unless closed form given
    if (!G_closed_) {
        cheb_x_.resize(kChebNodes + 1);
        cheb_G_.resize(kChebNodes + 1);
        for (int k = 0; k <= kChebNodes; ++k)
            cheb_x_[k] = 0.5 * kPi * (1.0 + std::cos(kPi * double(k) / kChebNodes));
        // cheb_x_[0] = pi descending to cheb_x_[n] = 0; accumulate from pi
        cheb_G_[0] = 0.0;
        for (int k = 1; k <= kChebNodes; ++k) {
            const double seg =
                integrate_adaptive([this](double t) { return g_base_(t); },
                                   cheb_x_[k], cheb_x_[k - 1], 1e-12, 1e-13)
                    .value;
            cheb_G_[k] = cheb_G_[k - 1] - seg;
        }
    }
    rep.G0 = eval_G(0.0);

    // contraction bound for the series hand-off radius
    {
        double c1 = 0.0;
        const double a = -kPi / 4.0, b = 5.0 * kPi / 4.0;
        for (int i = 0; i <= 512; ++i) {
            const double x = a + (b - a) * double(i) / 512;
            const double gp =
                (g(x + kDerivStep) - g(x - kDerivStep)) / (2.0 * kDerivStep);
            c1 = std::max(c1, std::fabs(g(x)) + std::fabs(gp));
        }
        c1_bound_ = c1;
    }
}

Potential build_potential(const PotentialSpec& spec, int n_grid, double tol_root) {
    if (n_grid < 64) throw std::invalid_argument("build_potential: n_grid < 64");
    Expr ge = Expr::parse(spec.g_text);
    for (const auto& name : ge.free_params())
        if (!spec.params.count(name))
            throw std::invalid_argument("build_potential: unbound parameter '" +
                                        name + "' in g");

    Potential p;
    auto params = spec.params;
    p.g_base_ = [ge, params](double x) { return ge.eval(x, params); };

    if (spec.G_text) {
        Expr Ge = Expr::parse(*spec.G_text);
        for (const auto& name : Ge.free_params())
            if (!spec.params.count(name))
                throw std::invalid_argument(
                    "build_potential: unbound parameter '" + name + "' in G");
        // shift so that G(pi) = 0 holds exactly
        const double shift = Ge.eval(kPi, params);
        p.G_closed_ = [Ge, params, shift](double x) {
            return Ge.eval(x, params) - shift;
        };
        if (std::fabs(shift) > 1e-9)
            p.report_.messages.push_back("supplied G shifted by " +
                                         format_g(-shift) +
                                         " to enforce G(pi) = 0");
    }

    std::ostringstream id;
    id << "g=" << spec.g_text << ";params{";
    bool first = true;
    for (const auto& [k, v] : spec.params) {
        if (!first) id << ',';
        first = false;
        id << k << '=' << format_g(v);
    }
    id << '}';
    p.id_ = id.str();

    p.finish_build(n_grid, tol_root, /*closed_forms=*/false);
    return p;
}

Potential landau_lifshitz(double lambda, double omega) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("landau_lifshitz: lambda must be positive");
    Potential p;
    p.g_base_ = [lambda, omega](double x) {
        return (omega + lambda * std::cos(x)) * std::sin(x);
    };
    // stable form: omega*(1 + cos x) = 2*omega*cos^2(x/2)
    p.G_closed_ = [lambda, omega](double x) {
        const double s = std::sin(x), c = std::cos(0.5 * x);
        return 0.5 * lambda * s * s - 2.0 * omega * c * c;
    };
    p.gprime_pi_ = lambda - omega;
    p.gprime_0_ = lambda + omega;
    p.gsecond_pi_ = 0.0;
    const double ratio = omega / lambda;
    if (ratio > -1.0 && ratio < 1.0) {
        p.xi_ = std::acos(-ratio);
        p.has_closed_xi_ = true;
    }
    p.report_.integral_g = 2.0 * omega;

    std::ostringstream id;
    id << "landau_lifshitz(lambda=" << format_g(lambda)
       << ",omega=" << format_g(omega) << ')';
    p.id_ = id.str();

    p.finish_build(2048, 1e-12, /*closed_forms=*/true);
    const bool ok = omega > 0.0 && omega < lambda;
    if (p.report_.ok != ok)
        p.report_.messages.push_back(
            "sampled condition check disagrees with closed-form classification");
    p.report_.ok = ok;
    return p;
}

Potential zero_potential() {
    Potential p;
    p.g_base_ = [](double) { return 0.0; };
    p.G_closed_ = [](double) { return 0.0; };
    p.gprime_pi_ = 0.0;
    p.gprime_0_ = 0.0;
    p.gsecond_pi_ = 0.0;
    p.report_.integral_g = 0.0;
    p.id_ = "zero";
    p.finish_build(256, 1e-12, /*closed_forms=*/true);
    p.report_.ok = false;
    return p;
}

}  // namespace equivar
