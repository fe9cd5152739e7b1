#include "equivar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "equivar/quadrature.hpp"

namespace equivar {

namespace {

constexpr double kPi = 3.14159265358979323846;

// G(profile(r)) evaluated stably: near the pole the distance to pi is
// 2*arctan((lambda*r)^-m) and G goes through its quadratic Taylor form.
double G_along_profile(const Potential& p, int m, double lambda, double r) {
    const double y = std::pow(lambda * r, m);
    const double u = 2.0 * std::atan(1.0 / y);  // pi - profile
    if (u < 1e-6) return p.G_near_pi(u);
    return p.eval_G(kPi - u);
}

struct CriterionQuad {
    double value;
    double error;
};

// Head integral on [0, R_c] plus analytic tail for the degree-m profile
// with scale lambda (m >= 2).
CriterionQuad criterion_quadrature(const Potential& p, int m, double lambda) {
    const double gp = p.gprime_pi();
    const double gs = p.gsecond_pi();
    const double lam2m = std::pow(lambda, -2 * m);

    auto integrand = [&](double r) { return G_along_profile(p, m, lambda, r); };
    auto head_quad = [&](double R) {
        return integrate_adaptive([&](double r) { return integrand(r) * r; },
                                  0.0, R, 1e-12, 1e-13, 20000);
    };
    // leading tail coefficient: G(profile)*r ~ 2*g'(pi)*lambda^(-2m)*r^(1-2m)
    auto tail_lead = [&](double R) {
        return 2.0 * gp * lam2m * std::pow(R, 2 - 2 * m) / (2.0 * m - 2.0);
    };
    auto tail_next_bound = [&](double R) {
        const double t3 = 4.0 / 3.0 * std::fabs(gs) * std::pow(lambda, -3 * m) *
                          std::pow(R, 2 - 3 * m) / (3.0 * m - 2.0);
        const double t4 = 4.0 / 3.0 * std::fabs(gp) * std::pow(lambda, -4 * m) *
                          std::pow(R, 2 - 4 * m) / (4.0 * m - 2.0);
        return 2.0 * (t3 + t4);
    };

    // start where pi - profile is 1e-3, push R_c until the tail estimate is
    // negligible against the head (floored by the absolute scale of G)
    double Rc = std::pow(2000.0, 1.0 / m) / lambda;
    QuadResult head = head_quad(Rc);
    const double scale =
        integrate_adaptive(
            [&](double r) { return std::fabs(integrand(r)) * r; }, 0.0, Rc,
            1e-12, 1e-13, 20000)
            .value;
    const double floor = std::max({std::fabs(head.value), scale, 1e-6});
    while (std::fabs(tail_lead(Rc)) > 1e-10 * floor) {
        Rc *= 2.0;
        head = head_quad(Rc);
    }
    return CriterionQuad{head.value + tail_lead(Rc),
                         head.error + tail_next_bound(Rc)};
}

}  // namespace

double harmonic_profile(int m, double lambda, double r) {
    return 2.0 * std::atan(std::pow(lambda * r, m));
}

double harmonic_profile_deriv(int m, double lambda, double r) {
    if (r == 0.0) return m == 1 ? 2.0 * lambda : 0.0;
    return m * std::sin(harmonic_profile(m, lambda, r)) / r;
}

CriterionValue existence_criterion(const Potential& p, int m, double lambda) {
    if (m < 1)
        throw std::invalid_argument("existence_criterion: m must be positive");
    if (!(lambda > 0.0))
        throw std::invalid_argument("existence_criterion: lambda must be positive");
    CriterionValue cv;
    cv.tail_exponent = 1.0 - 2.0 * m;
    if (m == 1) {
        if (p.gprime_pi() > 0.0) {
            cv.kind = CriterionValue::Kind::PlusInfinity;
            return cv;
        }
        throw std::invalid_argument(
            "existence_criterion: m = 1 needs g'(pi) > 0 (condition (iii))");
    }
    const CriterionQuad q = criterion_quadrature(p, m, lambda);
    cv.kind = CriterionValue::Kind::Finite;
    cv.value = q.value;
    cv.quadrature_error = q.error;
    return cv;
}

CriterionValue ll_criterion_closed_form(double lambda, double omega, int m) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("ll_criterion_closed_form: lambda <= 0");
    if (m < 1)
        throw std::invalid_argument("ll_criterion_closed_form: m must be positive");
    CriterionValue cv;
    cv.tail_exponent = 1.0 - 2.0 * m;
    if (m == 1) {
        cv.kind = CriterionValue::Kind::PlusInfinity;
        return cv;
    }
    const double c0 = kPi / (m * std::sin(kPi / m));
    cv.kind = CriterionValue::Kind::Finite;
    cv.value = (lambda / m - omega) * c0;
    cv.quadrature_error = 0.0;
    return cv;
}

PohozaevResult pohozaev_residual(const Trajectory& t, const Potential& p,
                                 int m) {
    const size_t n = t.size();
    if (n < 2)
        throw std::invalid_argument("pohozaev_residual: need >= 2 samples");

    // cumulative trapezoid of G(h)*t on the samples
    std::vector<double> cum(n, 0.0);
    double prev_f = p.G_ext(t.h[0]) * t.r[0];
    for (size_t i = 1; i < n; ++i) {
        const double f = p.G_ext(t.h[i]) * t.r[i];
        cum[i] = cum[i - 1] + 0.5 * (prev_f + f) * (t.r[i] - t.r[i - 1]);
        prev_f = f;
    }

    PohozaevResult out;
    out.profile.assign(n, 0.0);
    const double s = t.r[0];
    const double sh2 = s * t.hprime[0] * s * t.hprime[0];
    const double sin_s = std::sin(t.h[0]);
    const double m2 = double(m) * m;
    const double Gs = p.G_ext(t.h[0]) * s * s;
    for (size_t i = 1; i < n; ++i) {
        const double r = t.r[i];
        const double rh2 = r * t.hprime[i] * r * t.hprime[i];
        const double sin_r = std::sin(t.h[i]);
        const double Gr = p.G_ext(t.h[i]) * r * r;
        const double resid = rh2 - sh2 - m2 * (sin_r * sin_r - sin_s * sin_s) -
                             2.0 * (Gr - Gs) + 4.0 * cum[i];
        const double norm =
            std::max({std::fabs(rh2), std::fabs(sh2), m2 * sin_r * sin_r,
                      m2 * sin_s * sin_s, 2.0 * std::fabs(Gr),
                      2.0 * std::fabs(Gs), 4.0 * std::fabs(cum[i])});
        const double rel = norm > 0.0 ? std::fabs(resid) / norm : 0.0;
        out.profile[i] = rel;
        out.max_rel = std::max(out.max_rel, rel);
    }
    return out;
}

TailFit tail_fit(const Trajectory& t) {
    const size_t n = t.size();
    if (n < 8) throw std::invalid_argument("tail_fit: too few samples");
    const double r_lo = t.r.front() + 0.75 * (t.r.back() - t.r.front());
    size_t i0 = n;
    for (size_t i = 0; i < n; ++i) {
        if (t.r[i] >= r_lo) {
            i0 = i;
            break;
        }
    }
    if (n - i0 < 8)
        throw std::invalid_argument("tail_fit: too few samples in final quarter");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    size_t cnt = 0;
    for (size_t i = i0; i < n; ++i) {
        const double u = kPi - t.h[i];
        if (!(u > 0.0 && u < 0.1))
            throw std::invalid_argument(
                "tail_fit: final quarter must satisfy 0 < pi - h < 0.1");
        const double x = t.r[i], y = std::log(u);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++cnt;
    }
    const double det = cnt * sxx - sx * sx;
    TailFit fit;
    fit.rate = (cnt * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.rate * sx) / cnt;
    const double ss_tot = syy - sy * sy / cnt;
    double ss_res = 0.0;
    for (size_t i = i0; i < n; ++i) {
        const double y = std::log(kPi - t.h[i]);
        const double e = y - (fit.intercept + fit.rate * t.r[i]);
        ss_res += e * e;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

double tail_rate(const Trajectory& t, const Potential&) {
    return tail_fit(t).rate;
}

double expected_tail_rate(const Potential& p) {
    return -std::sqrt(0.5 * std::max(p.gprime_pi(), 0.0));
}

ScalingCheck scaling_check(const Potential& p, int m, double lambda) {
    if (m < 2)
        throw std::invalid_argument("scaling_check: finite case needs m >= 2");
    ScalingCheck sc;
    sc.lhs = criterion_quadrature(p, m, lambda).value;
    sc.rhs = criterion_quadrature(p, m, 1.0).value / (lambda * lambda);
    return sc;
}

}  // namespace equivar
