#pragma once

#include <vector>

#include "equivar/potential.hpp"

namespace equivar {

/// Piecewise-linear profile on a geometric grid over [s, R] with the
/// boundary values h(s) = xi and h(R) = pi pinned; energy is the
/// discretized half-line functional (trapezoid in r).
struct DiscreteProfile {
    int m = 0;
    double s = 0.0;
    double R = 0.0;
    std::vector<double> nodes;
    std::vector<double> values;
    double energy = 0.0;
    long iterations = 0;
    bool converged = false;
    bool box_active_at_convergence = false;
};

struct MinimizeOptions {
    double grad_tol = 1e-8;  // sup-norm of the projected gradient
    long max_iter = 200000;
};

/// Geometric nodes s*(R/s)^(j/n).
std::vector<double> geometric_nodes(double s, double R, int n);

/// Discrete energy of arbitrary node values (box and pins not enforced).
double discrete_energy(const Potential& p, int m,
                       const std::vector<double>& nodes,
                       const std::vector<double>& values);

/// The linear ramp competitor from xi at s to pi at R.
DiscreteProfile ramp_profile(const Potential& p, int m, double s, double R,
                             int n);

/// Minimize the discrete energy over profiles confined to [xi, pi] by
/// projected gradient descent (Barzilai-Borwein steps with a backtracking
/// line search; accepted iterations never increase the energy). Starts
/// from the linear ramp. Deterministic.
DiscreteProfile minimize_Js(const Potential& p, int m, double s, double R,
                            int n, const MinimizeOptions& opts = {});

/// Max over interior nodes of the flux-form equation residual
///   (r h')' - (m^2/r) sin h cos h - g(h) r
/// with second differences on the graded grid, normalized by
/// max(1, |g|_inf * R).
double euler_lagrange_residual(const DiscreteProfile& dp, const Potential& p,
                               int m);

/// One-sided three-point estimate of h'(s).
double initial_slope(const DiscreteProfile& dp);

}  // namespace equivar
