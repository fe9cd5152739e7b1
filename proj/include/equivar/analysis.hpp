#pragma once

#include <vector>

#include "equivar/integrate.hpp"
#include "equivar/potential.hpp"

namespace equivar {

/// Value of the solvability integral over the harmonic-map profile.
/// PlusInfinity occurs exactly when m = 1 and g'(pi) > 0 (the integrand
/// then decays like 1/r).
struct CriterionValue {
    enum class Kind { Finite, PlusInfinity } kind = Kind::Finite;
    double value = 0.0;            // Finite only
    double quadrature_error = 0.0; // Finite only
    double tail_exponent = 0.0;    // 1 - 2m, the integrand's decay power

    bool is_positive() const {
        return kind == Kind::PlusInfinity || value > 0.0;
    }
};

/// The explicit harmonic-map profile 2*arctan((lambda*r)^m).
double harmonic_profile(int m, double lambda, double r);
/// Its radial derivative, m*sin(profile)/r for r > 0.
double harmonic_profile_deriv(int m, double lambda, double r);

/// Integral of G(profile(r))*r over (0, inf) for the degree-m harmonic
/// profile with scale lambda. Head by adaptive quadrature on [0, R_c],
/// tail by the leading asymptotic 2*g'(pi)*R^(2-2m)/(2m-2) scaled by
/// lambda^(-2m), with R_c pushed until the tail estimate is 1e-10 of the
/// head; the next-order bound is folded into quadrature_error.
/// Conditions (i)-(iii) are assumed for the result to mean solvability;
/// they are not re-checked here.
CriterionValue existence_criterion(const Potential& p, int m,
                                   double lambda = 1.0);

/// Closed form for the Landau-Lifshitz family: PlusInfinity at m = 1,
/// otherwise (lambda/m - omega)*C0 with C0 = B(1/m, 1-1/m)/m evaluated
/// via the reflection formula B(x, 1-x) = pi/sin(pi*x).
CriterionValue ll_criterion_closed_form(double lambda, double omega, int m);

/// First-integral (Pohozaev) check along a trajectory: for each sample r
/// against the first sample s,
///   (r h')^2 - (s h'(s))^2 - m^2 (sin^2 h(r) - sin^2 h(s))
///     - 2 (G(h(r)) r^2 - G(h(s)) s^2) + 4 Int_s^r G(h) t dt
/// vanishes for exact solutions. The integral uses the trapezoid rule on
/// the trajectory samples; each residual is normalized by the largest of
/// its terms.
struct PohozaevResult {
    double max_rel = 0.0;
    std::vector<double> profile;  // per-sample normalized residuals
};
PohozaevResult pohozaev_residual(const Trajectory& t, const Potential& p,
                                 int m);

/// Least-squares fit of log(pi - h) against r over the trajectory's final
/// quarter. For connecting orbits the slope approximates -sqrt(g'(pi)/2);
/// r_squared flags windows where the decay is not exponential.
struct TailFit {
    double rate = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
TailFit tail_fit(const Trajectory& t);
double tail_rate(const Trajectory& t, const Potential& p);
double expected_tail_rate(const Potential& p);

/// Both sides of the scale identity: the integral over the profile with
/// scale lambda equals lambda^(-2) times the integral at scale 1.
struct ScalingCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};
ScalingCheck scaling_check(const Potential& p, int m, double lambda);

}  // namespace equivar
