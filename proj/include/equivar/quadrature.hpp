#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace equivar {

/// Result of an adaptive quadrature pass.
struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // accumulated error estimate
    long evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 pair on [-1, 1]. Nodes are symmetric; only the
// nonnegative ones are stored. wg are the Gauss-7 weights (zero entries
// mark Kronrod-only nodes), wk the Kronrod-15 weights.
inline constexpr double gk_nodes[8] = {
    0.000000000000000000, 0.207784955007898468, 0.405845151377397167,
    0.586087235467691130, 0.741531185599394440, 0.864864423359769073,
    0.949107912342758525, 0.991455371120812639};
inline constexpr double gk_wg[8] = {
    0.417959183673469388, 0.0, 0.381830050505118945,
    0.0, 0.279705391489276668, 0.0,
    0.129484966168869693, 0.0};
inline constexpr double gk_wk[8] = {
    0.209482141084727828, 0.204432940075298892, 0.190350578064785410,
    0.169004726639267903, 0.140653259715525919, 0.104790010322250184,
    0.063092092629978553, 0.022935322010529225};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double g7 = gk_wg[0] * fc;
    double k15 = gk_wk[0] * fc;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * gk_nodes[i];
        const double fsum = f(c - dx) + f(c + dx);
        g7 += gk_wg[i] * fsum;
        k15 += gk_wk[i] * fsum;
    }
    g7 *= h;
    k15 *= h;
    value = k15;
    const double d = std::fabs(k15 - g7);
    // standard QUADPACK-style sharpened estimate
    err = d * std::sqrt(std::min(1.0, 200.0 * d));
    if (!(err > 0.0)) err = d;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b] to absolute
/// tolerance abs_tol (with a relative floor rel_tol on the running sum).
/// Bisects the worst interval first via a simple stack.
template <class F>
QuadResult integrate_adaptive(const F& f, double a, double b,
                              double abs_tol = 1e-12, double rel_tol = 1e-12,
                              int max_intervals = 4000) {
    struct Seg { double a, b, value, error; };
    QuadResult out;
    if (a == b) return out;

    std::vector<Seg> segs;
    Seg s0{a, b, 0.0, 0.0};
    detail::gk15(f, a, b, s0.value, s0.error);
    out.evaluations += 15;
    segs.push_back(s0);

    auto total = [&segs]() {
        double v = 0.0, e = 0.0;
        for (const auto& s : segs) { v += s.value; e += s.error; }
        return std::pair{v, e};
    };

    while (true) {
        auto [v, e] = total();
        if (e <= std::max(abs_tol, rel_tol * std::fabs(v))) {
            out.value = v;
            out.error = e;
            return out;
        }
        if ((int)segs.size() >= max_intervals)
            throw std::runtime_error("quadrature: interval budget exhausted");
        // split the segment with the largest error
        size_t worst = 0;
        for (size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        Seg s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        Seg l{s.a, mid, 0.0, 0.0}, r{mid, s.b, 0.0, 0.0};
        detail::gk15(f, l.a, l.b, l.value, l.error);
        detail::gk15(f, r.a, r.b, r.value, r.error);
        out.evaluations += 30;
        segs[worst] = l;
        segs.push_back(r);
    }
}

// Gauss-Legendre 7 on [-1, 1]: used for fixed per-cell quadrature where the
// integrand is known smooth.
inline constexpr double gl7_nodes[7] = {
    -0.949107912342758525, -0.741531185599394440, -0.405845151377397167,
    0.0,
    0.405845151377397167, 0.741531185599394440, 0.949107912342758525};
inline constexpr double gl7_weights[7] = {
    0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
    0.417959183673469388,
    0.381830050505118945, 0.279705391489276668, 0.129484966168869693};

}  // namespace equivar
