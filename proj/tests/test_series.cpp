#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "equivar/series.hpp"

using namespace equivar;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("choose_delta") {
    // g == 0 makes the delta^2 term vanish
    CHECK(choose_delta(1, 0.0, 0.5) == 1.0);
    // direct substitution into the contraction bound
    CHECK(choose_delta(2, 2.0, 0.5) == 1.0);  // sqrt(4.5) capped at 1
    CHECK(choose_delta(1, 100.0, 0.2) ==
          doctest::Approx(std::sqrt((0.2 - 1.0 / 9.0) * 25.0 / 100.0))
              .epsilon(1e-15));
    CHECK_THROWS_AS(choose_delta(1, 1.0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(choose_delta(1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(choose_delta(2, 1.0, 0.25), std::invalid_argument);
}

TEST_CASE("fixed point recovers the cubic coefficient of the harmonic map") {
    // exact solution 2*arctan(r/2) = r - r^3/12 + ..., so phi(0) = -1/12
    const Potential p = zero_potential();
    const LocalSeriesSolution ls = fixed_point_solve(p, 1, 1.0, 0.4);
    CHECK(ls.contraction_kappa < 1.0);
    CHECK(ls.phi[0] == doctest::Approx(-1.0 / 12.0).epsilon(1e-9));
    CHECK(fixed_point_residual(p, ls) <= 10e-12);
}

TEST_CASE("degree-2 harmonic map has no r^4 correction") {
    // 2*arctan(r^2) = 2r^2 - (2/3) r^6 + ...
    const Potential p = zero_potential();
    const LocalSeriesSolution ls = fixed_point_solve(p, 2, 2.0, 0.4);
    CHECK(std::fabs(ls.phi[0]) < 1e-10);
}

TEST_CASE("leading balance with a potential") {
    // order-r^m balance gives phi(0) = g'(0)*a/(4m+4)
    const Potential p = landau_lifshitz(1.0, 0.25);
    const LocalSeriesSolution ls =
        fixed_point_solve(p, 2, 1.0, handoff_radius(p, 2, 1.0));
    CHECK(ls.phi[0] == doctest::Approx(1.25 / 12.0).epsilon(1e-8));
}

TEST_CASE("hand-off state matches the exact harmonic map") {
    // h'(0) = a = 2 picks the profile 2*arctan(r), so h(0.5) = 2*arctan(0.5)
    const Potential p = zero_potential();
    const LocalSeriesSolution ls = fixed_point_solve(p, 1, 2.0, 0.5);
    const InitialState st = initial_state(ls);
    CHECK(st.r0 == 0.5);
    CHECK(st.h == doctest::Approx(2.0 * std::atan(0.5)).epsilon(1e-10));
    const double exact_slope = 2.0 / (1.0 + 0.25);  // d/dr 2*arctan(r) at 1/2
    CHECK(st.hprime == doctest::Approx(exact_slope).epsilon(1e-10));
}

TEST_CASE("a = 0 gives the zero solution") {
    const Potential p = landau_lifshitz(1.0, 0.25);
    const LocalSeriesSolution ls = fixed_point_solve(p, 1, 0.0, 0.5);
    CHECK(ls.h_delta == 0.0);
    CHECK(ls.hprime_delta == 0.0);
    CHECK(ls.iterations <= 2);
}

TEST_CASE("small-delta hand-off is dominated by the leading terms") {
    const Potential p = landau_lifshitz(1.0, 0.25);
    const LocalSeriesSolution ls = fixed_point_solve(p, 2, 1.0, 0.3);
    const double approx = 1.0 * 0.09 + 0.0081 * (1.25 / 12.0);
    CHECK(ls.h_delta == doctest::Approx(approx).epsilon(0.0).scale(1.0));
    CHECK(std::fabs(ls.h_delta - approx) < 1e-5);
}

TEST_CASE("fixed-point residual bound") {
    const Potential p = landau_lifshitz(1.0, 0.3);
    for (int m : {1, 2, 3}) {
        const double delta = handoff_radius(p, m, 1.0);
        const LocalSeriesSolution ls = fixed_point_solve(p, m, 1.0, delta);
        CHECK(fixed_point_residual(p, ls) <= 10e-12);
    }
}

TEST_CASE("ODE residual at the hand-off radius") {
    const Potential p = landau_lifshitz(1.0, 0.25);
    for (int m : {1, 2, 3}) {
        const LocalSeriesSolution ls =
            fixed_point_solve(p, m, 1.0, handoff_radius(p, m, 1.0));
        CHECK(ode_residual_at_handoff(p, ls) <= 1e-8);
    }
}

TEST_CASE("hand-off state depends Lipschitz-continuously on a") {
    const Potential p = landau_lifshitz(1.0, 0.25);
    for (int m : {1, 2, 3}) {
        const double delta = handoff_radius(p, m, 1.5);
        for (int n_grid : {256, 512}) {
            const LocalSeriesSolution base =
                fixed_point_solve(p, m, 1.0, delta, 1e-12, 200, n_grid);
            double lip = 0.0;
            for (double a : {0.5, 0.75, 1.25, 1.5}) {
                const LocalSeriesSolution ls =
                    fixed_point_solve(p, m, a, delta, 1e-12, 200, n_grid);
                const double dh = std::fabs(ls.h_delta - base.h_delta);
                const double dv = std::fabs(ls.hprime_delta - base.hprime_delta);
                lip = std::max(lip, std::max(dh, dv) / std::fabs(a - 1.0));
            }
            CHECK(lip < 10.0);  // finite, grid-stable
            if (n_grid == 512) {
                // compare against the 256-grid value computed above
                const LocalSeriesSolution coarse =
                    fixed_point_solve(p, m, 1.0, delta, 1e-12, 200, 256);
                CHECK(base.h_delta ==
                      doctest::Approx(coarse.h_delta).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("non-contractive delta is rejected") {
    const Potential p = landau_lifshitz(4.0, 1.0);  // large C1 bound
    CHECK_THROWS(fixed_point_solve(p, 1, 1.0, 5.0));
}

TEST_CASE("handoff_radius caps by the shot amplitude") {
    const Potential p = landau_lifshitz(1.0, 0.25);
    const double d1 = handoff_radius(p, 2, 1.0);
    const double d2 = handoff_radius(p, 2, 1e6);
    CHECK(d2 < d1);
    CHECK(1e6 * d2 * d2 <= 0.4 * 1.0000001);
    // the series still converges at the capped radius
    const LocalSeriesSolution ls = fixed_point_solve(p, 2, 1e6, d2);
    CHECK(ls.h_delta > 0.0);
    CHECK(ls.h_delta < kPi / 2);
}
