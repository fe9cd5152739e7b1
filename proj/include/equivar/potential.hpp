#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace equivar {

/// User-supplied potential: expression text for g(x) on [0, pi] plus
/// parameter bindings. G may be given in closed form; otherwise it is
/// built by quadrature of g with G(pi) = 0.
struct PotentialSpec {
    std::string g_text;
    std::map<std::string, double> params;
    std::optional<std::string> G_text;
};

/// Findings of the structural checks on g:
///   (i)   exactly one interior zero xi, with g > 0 on (0, xi) and
///         g < 0 on (xi, pi),
///   (ii)  integral of g over [0, pi] positive,
///   (iii) g'(pi) > 0.
/// The sign pattern is verified on a sample grid and recorded as such.
struct ConditionReport {
    bool ok = false;
    double xi = 0.0;
    std::vector<double> zeros_found;
    std::vector<std::pair<double, double>> sign_violations;  // (x, g(x))
    double integral_g = 0.0;
    double gprime_pi = 0.0;
    double gprime_0 = 0.0;
    double G0 = 0.0;
    std::vector<std::string> messages;
};

/// The pair (g, G) on [0, pi] with the interior zero and endpoint
/// derivatives. Immutable after construction; safe for shared reads.
///
/// g is extended beyond [0, pi] by odd reflection about both endpoints
/// (g(-t) = -g(t), g(pi+t) = -g(pi-t)); integrators that momentarily
/// overshoot the strip see a C^1 extension consistent with the equation's
/// symmetry. G is correspondingly even about 0 and pi.
class Potential {
public:
    /// g at any real x (odd-reflection extension outside [0, pi]).
    double g(double x) const;

    /// G(x) = -integral of g from x to pi, for x in [0, pi] only.
    /// Throws std::domain_error outside.
    double eval_G(double x) const;

    /// Even-reflection extension of G; used by diagnostics whose inputs may
    /// sit a rounding error outside the strip.
    double G_ext(double x) const;

    /// Stable value of G near pi: 0.5*g'(pi)*u^2 with the cubic Taylor
    /// correction, u = pi - x. Avoids the cancellation in direct
    /// evaluation when u is tiny.
    double G_near_pi(double u) const;

    double xi() const { return xi_; }
    double gprime_pi() const { return gprime_pi_; }
    double gprime_0() const { return gprime_0_; }
    /// One-sided estimate of g''(pi) from inside the strip.
    double gsecond_pi() const { return gsecond_pi_; }
    const ConditionReport& report() const { return report_; }
    const std::string& id() const { return id_; }

    /// sup of |g| + |g'| over [-pi/4, 5*pi/4] on a 512-point grid; the
    /// contraction bound used when choosing the series hand-off radius.
    double c1_bound() const { return c1_bound_; }

    friend Potential build_potential(const PotentialSpec&, int, double);
    friend Potential landau_lifshitz(double, double);
    friend Potential zero_potential();

private:
    Potential() = default;
    void finish_build(int n_grid, double tol_root, bool closed_forms);

    std::function<double(double)> g_base_;   // g on [0, pi]
    std::function<double(double)> G_closed_; // optional closed form on [0, pi]
    std::vector<double> cheb_x_, cheb_G_;    // quadrature cache nodes/values
    double xi_ = 0.0;
    double gprime_pi_ = 0.0;
    double gprime_0_ = 0.0;
    double gsecond_pi_ = 0.0;
    double c1_bound_ = 0.0;
    ConditionReport report_;
    std::string id_;
    bool has_closed_xi_ = false;
};

/// Build from expression text. Locates xi by sign-change bracketing plus
/// bisection to tol_root; derivatives by central differences (step 1e-5)
/// on the reflected extension; G by adaptive quadrature cached on a
/// Chebyshev grid unless G_text is given.
Potential build_potential(const PotentialSpec& spec, int n_grid = 2048,
                          double tol_root = 1e-12);

/// Landau-Lifshitz family g(h) = (omega + lambda*cos h)*sin h with all
/// closed forms registered:
///   G(x) = (lambda/2)*sin^2 x - omega*(1 + cos x),
///   xi = arccos(-omega/lambda) when 0 < omega < lambda,
///   g'(pi) = lambda - omega, g'(0) = lambda + omega.
/// report.ok iff 0 < omega < lambda. Requires lambda > 0.
Potential landau_lifshitz(double lambda, double omega);

/// g identically zero (the pure harmonic-map equation). Fails validation
/// by construction; used to exercise solver paths against closed forms.
Potential zero_potential();

}  // namespace equivar
