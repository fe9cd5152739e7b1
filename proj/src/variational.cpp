#include "equivar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace equivar {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Discretization {
    const Potential& p;
    int m;
    std::vector<double> r;

    double energy(const std::vector<double>& h) const {
        const size_t n = r.size() - 1;
        double e = 0.0;
        for (size_t j = 0; j < n; ++j) {
            const double dr = r[j + 1] - r[j];
            const double slope = (h[j + 1] - h[j]) / dr;
            e += slope * slope * (r[j + 1] * r[j + 1] - r[j] * r[j]) / 4.0;
        }
        double prev = density(h[0], r[0]);
        for (size_t j = 0; j < n; ++j) {
            const double cur = density(h[j + 1], r[j + 1]);
            e += 0.5 * (prev + cur) * (r[j + 1] - r[j]);
            prev = cur;
        }
        return e;
    }

    // gradient with respect to the interior values h[1..n-1]
    void gradient(const std::vector<double>& h, std::vector<double>& g) const {
        const size_t n = r.size() - 1;
        g.assign(n + 1, 0.0);
        for (size_t j = 0; j < n; ++j) {
            const double dr = r[j + 1] - r[j];
            const double coef =
                (r[j + 1] * r[j + 1] - r[j] * r[j]) / (2.0 * dr * dr);
            const double diff = h[j + 1] - h[j];
            g[j + 1] += coef * diff;
            g[j] -= coef * diff;
        }
        for (size_t k = 1; k < n; ++k) {
            const double w = 0.5 * (r[k + 1] - r[k - 1]);
            g[k] += density_dh(h[k], r[k]) * w;
        }
        g[0] = g[n] = 0.0;  // pinned
    }

  private:
    double density(double h, double rr) const {
        const double s = std::sin(h);
        return 0.5 * m * m / rr * s * s + p.eval_G(std::clamp(h, 0.0, kPi)) * rr;
    }
    double density_dh(double h, double rr) const {
        return 0.5 * m * m / rr * std::sin(2.0 * h) +
               p.g(std::clamp(h, 0.0, kPi)) * rr;
    }
};

}  // namespace

std::vector<double> geometric_nodes(double s, double R, int n) {
    std::vector<double> r(n + 1);
    const double ratio = R / s;
    for (int j = 0; j <= n; ++j) r[j] = s * std::pow(ratio, double(j) / n);
    r[0] = s;
    r[n] = R;
    return r;
}

double discrete_energy(const Potential& p, int m,
                       const std::vector<double>& nodes,
                       const std::vector<double>& values) {
    return Discretization{p, m, nodes}.energy(values);
}

DiscreteProfile ramp_profile(const Potential& p, int m, double s, double R,
                             int n) {
    DiscreteProfile dp;
    dp.m = m;
    dp.s = s;
    dp.R = R;
    dp.nodes = geometric_nodes(s, R, n);
    const double xi = p.xi();
    dp.values.resize(n + 1);
    for (int j = 0; j <= n; ++j)
        dp.values[j] = xi + (kPi - xi) * (dp.nodes[j] - s) / (R - s);
    dp.values[0] = xi;
    dp.values[n] = kPi;
    dp.energy = discrete_energy(p, m, dp.nodes, dp.values);
    return dp;
}

DiscreteProfile minimize_Js(const Potential& p, int m, double s, double R,
                            int n, const MinimizeOptions& opts) {
    if (!p.report().ok)
        throw std::invalid_argument(
            "minimize_Js: potential fails conditions (i)-(iii)");
    if (!(R > s && s > 0.0))
        throw std::invalid_argument("minimize_Js: need 0 < s < R");
    if (n < 128) throw std::invalid_argument("minimize_Js: n must be >= 128");

    DiscreteProfile dp = ramp_profile(p, m, s, R, n);
    Discretization disc{p, m, dp.nodes};
    const double xi = p.xi();

    std::vector<double>& h = dp.values;
    std::vector<double> g, g_new, h_new;
    disc.gradient(h, g);
    double energy = dp.energy;

    auto projected_grad_norm = [&](const std::vector<double>& hh,
                                   const std::vector<double>& gg) {
        double sup = 0.0;
        for (int k = 1; k < n; ++k) {
            double pg = gg[k];
            if (hh[k] <= xi) pg = std::min(pg, 0.0);
            if (hh[k] >= kPi) pg = std::max(pg, 0.0);
            sup = std::max(sup, std::fabs(pg));
        }
        return sup;
    };

    // conservative inverse-curvature scale for the first step
    double alpha0;
    {
        double diag = 0.0;
        for (int k = 1; k < n; ++k) {
            const double dl = dp.nodes[k] - dp.nodes[k - 1];
            const double du = dp.nodes[k + 1] - dp.nodes[k];
            const double cl = (dp.nodes[k] * dp.nodes[k] -
                               dp.nodes[k - 1] * dp.nodes[k - 1]) /
                              (2.0 * dl * dl);
            const double cu = (dp.nodes[k + 1] * dp.nodes[k + 1] -
                               dp.nodes[k] * dp.nodes[k]) /
                              (2.0 * du * du);
            diag = std::max(diag, cl + cu);
        }
        alpha0 = 1.0 / std::max(diag, 1e-12);
    }

    double alpha = alpha0;
    long it = 0;
    for (; it < opts.max_iter; ++it) {
        if (projected_grad_norm(h, g) <= opts.grad_tol) {
            dp.converged = true;
            break;
        }
        // projected step with Armijo backtracking along the arc
        double step = alpha;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            h_new = h;
            for (int k = 1; k < n; ++k)
                h_new[k] = std::clamp(h[k] - step * g[k], xi, kPi);
            double dir = 0.0;
            for (int k = 1; k < n; ++k) dir += g[k] * (h_new[k] - h[k]);
            const double e_new = disc.energy(h_new);
            if (e_new <= energy + 1e-4 * dir) {
                accepted = true;
                energy = e_new;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            throw std::runtime_error(
                "minimize_Js: line search failed to decrease the energy");

        disc.gradient(h_new, g_new);
        // Barzilai-Borwein step for the next iteration
        double ss = 0.0, sy = 0.0;
        for (int k = 1; k < n; ++k) {
            const double sk = h_new[k] - h[k];
            const double yk = g_new[k] - g[k];
            ss += sk * sk;
            sy += sk * yk;
        }
        alpha = (sy > 0.0) ? std::clamp(ss / sy, 1e-6 * alpha0, 1e6 * alpha0)
                           : 2.0 * step;
        h.swap(h_new);
        g.swap(g_new);
    }
    if (!dp.converged)
        throw std::runtime_error("minimize_Js: no convergence within max_iter");

    dp.energy = energy;
    dp.iterations = it;
    dp.box_active_at_convergence = false;
    for (int k = 1; k < n; ++k) {
        const bool at_lo = h[k] <= xi && g[k] > opts.grad_tol;
        const bool at_hi = h[k] >= kPi && g[k] < -opts.grad_tol;
        if (at_lo || at_hi) dp.box_active_at_convergence = true;
    }
    return dp;
}

double euler_lagrange_residual(const DiscreteProfile& dp, const Potential& p,
                               int m) {
    const auto& r = dp.nodes;
    const auto& h = dp.values;
    const int n = int(r.size()) - 1;
    double gmax = 0.0;
    for (int i = 0; i <= 256; ++i)
        gmax = std::max(gmax, std::fabs(p.g(kPi * i / 256.0)));
    const double scale = std::max(1.0, gmax * dp.R);
    double worst = 0.0;
    for (int k = 1; k < n; ++k) {
        const double dl = r[k] - r[k - 1], du = r[k + 1] - r[k];
        const double flux_u = 0.5 * (r[k] + r[k + 1]) * (h[k + 1] - h[k]) / du;
        const double flux_l = 0.5 * (r[k - 1] + r[k]) * (h[k] - h[k - 1]) / dl;
        const double div = (flux_u - flux_l) / (0.5 * (dl + du));
        const double res = div -
                           double(m) * m / r[k] * std::sin(h[k]) * std::cos(h[k]) -
                           p.g(h[k]) * r[k];
        worst = std::max(worst, std::fabs(res));
    }
    return worst / scale;
}

double initial_slope(const DiscreteProfile& dp) {
    const auto& r = dp.nodes;
    const auto& h = dp.values;
    const double d0 = r[1] - r[0], d1 = r[2] - r[1];
    return -(2.0 * d0 + d1) / (d0 * (d0 + d1)) * h[0] +
           (d0 + d1) / (d0 * d1) * h[1] - d0 / (d1 * (d0 + d1)) * h[2];
}

}  // namespace equivar
