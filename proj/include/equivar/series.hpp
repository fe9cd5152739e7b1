#pragma once

#include <vector>

#include "equivar/potential.hpp"

namespace equivar {

/// Local solution near the singular origin in the form
///   h(r) = a*r^m + r^(m+2)*phi(r),   r in [0, delta],
/// where phi is the fixed point of the integral correction operator.
/// h_delta equals a*delta^m + delta^(m+2)*phi(delta) by construction.
struct LocalSeriesSolution {
    int m = 0;
    double a = 0.0;
    double delta = 0.0;
    std::vector<double> grid;    // graded radii, grid[0] = 0, back() = delta
    std::vector<double> phi;     // correction values at the grid radii
    std::vector<double> inner;   // cumulative regularized inner integral
    double h_delta = 0.0;
    double hprime_delta = 0.0;
    int iterations = 0;
    double contraction_kappa = 0.0;

    /// Correction value at r in [0, delta] (piecewise-cubic interpolation).
    double phi_at(double r) const;
    /// h(r) = a*r^m + r^(m+2)*phi(r).
    double h_at(double r) const;
    /// h'(r) from the integral form; needs the potential for off-grid
    /// refinement of the cumulative integral.
    double hprime_at(const Potential& p, double r) const;
};

/// Largest hand-off radius (capped at 1) whose implied contraction
/// constant kappa = m^2/(m+2)^2 + C1_bound*delta^2/(m+4)^2 stays at or
/// below kappa_max. kappa_max must lie strictly between m^2/(m+2)^2 and 1.
double choose_delta(int m, double C1_bound, double kappa_max);

/// choose_delta with the potential's C1 bound, additionally capped so that
/// |a|*delta^m <= 0.4: for large shooting parameters the profile would
/// otherwise traverse its whole rise inside the series region.
double handoff_radius(const Potential& p, int m, double a,
                      double kappa_max = 0.5);

/// Solve the fixed-point problem for phi by Picard iteration from
/// phi = 0, on an n_grid-point graded grid clustered at the origin.
/// Stops when the successive-iterate sup-norm is at most
/// tol*min(1, (1-kappa)/kappa), which bounds the distance to the fixed
/// point by tol. Throws on non-convergence (delta too large for g).
LocalSeriesSolution fixed_point_solve(const Potential& p, int m, double a,
                                      double delta, double tol = 1e-12,
                                      int max_iter = 200, int n_grid = 256);

/// State hand-off for the outward integrator: (h(delta), h'(delta), delta).
struct InitialState {
    double h = 0.0;
    double hprime = 0.0;
    double r0 = 0.0;
};
InitialState initial_state(const LocalSeriesSolution& ls);

/// One more application of the correction operator at the converged
/// solution; returns sup over the grid of |phi - T(phi)|.
double fixed_point_residual(const Potential& p, const LocalSeriesSolution& ls);

/// Residual of the profile equation at r = delta, with h'' reconstructed
/// by one-sided differencing of the integral-form h'. Normalized by the
/// magnitude of the equation's terms.
double ode_residual_at_handoff(const Potential& p,
                               const LocalSeriesSolution& ls);

}  // namespace equivar
