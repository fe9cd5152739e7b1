#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "equivar/potential.hpp"

using namespace equivar;

namespace {
constexpr double kPi = 3.14159265358979323846;

PotentialSpec ll_spec(double lambda, double omega) {
    PotentialSpec s;
    s.g_text = "(omega + lambda*cos(x))*sin(x)";
    s.params = {{"lambda", lambda}, {"omega", omega}};
    return s;
}
}  // namespace

TEST_CASE("build_potential locates xi and the condition quantities") {
    const Potential p = build_potential(ll_spec(1.0, 0.3));
    CHECK(p.report().ok);
    // root of omega + lambda*cos(xi) = 0
    CHECK(p.xi() == doctest::Approx(std::acos(-0.3)).epsilon(1e-9));
    // antiderivative -omega*cos(x) - (lambda/4)*cos(2x) over [0, pi]
    CHECK(p.report().integral_g == doctest::Approx(0.6).epsilon(1e-10));
    // g'(x) = omega*cos(x) + lambda*cos(2x) at the endpoints
    CHECK(p.report().gprime_pi == doctest::Approx(0.7).epsilon(1e-7));
    CHECK(p.report().gprime_0 == doctest::Approx(1.3).epsilon(1e-7));
    CHECK(p.report().zeros_found.size() == 1);
    CHECK(p.report().sign_violations.empty());
}

TEST_CASE("no interior zero fails condition (i)") {
    PotentialSpec s;
    s.g_text = "sin(x)";
    const Potential p = build_potential(s);
    CHECK_FALSE(p.report().ok);
    CHECK(p.report().zeros_found.empty());
}

TEST_CASE("landau_lifshitz closed forms") {
    const Potential p = landau_lifshitz(1.0, 0.25);
    CHECK(p.report().ok);
    CHECK(p.eval_G(0.0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(std::fabs(p.eval_G(kPi)) < 1e-14);
    CHECK(p.eval_G(kPi / 2) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(p.xi() == doctest::Approx(std::acos(-0.25)).epsilon(1e-15));
    CHECK(p.eval_G(p.xi()) == doctest::Approx(0.28125).epsilon(1e-12));
    CHECK(p.gprime_pi() == 0.75);
    CHECK(p.gprime_0() == 1.25);

    CHECK_FALSE(landau_lifshitz(1.0, 1.5).report().ok);
    CHECK_FALSE(landau_lifshitz(1.0, 0.0).report().ok);
    CHECK_FALSE(landau_lifshitz(1.0, -0.2).report().ok);
    CHECK_FALSE(landau_lifshitz(1.0, 1.0).report().ok);
    CHECK(landau_lifshitz(2.0, 1.5).report().ok);
}

TEST_CASE("quadrature-built G matches the closed form uniformly") {
    const Potential quad = build_potential(ll_spec(1.0, 0.25));
    const Potential closed = landau_lifshitz(1.0, 0.25);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = kPi * i / 1000.0;
        worst = std::max(worst, std::fabs(quad.eval_G(x) - closed.eval_G(x)));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("G is unimodal with its maximum at xi and G(0) < 0") {
    const Potential p = build_potential(ll_spec(1.0, 0.4));
    REQUIRE(p.report().ok);
    const double xi = p.xi();
    double prev = p.eval_G(0.0);
    CHECK(prev < -1e-6);
    for (int i = 1; i <= 512; ++i) {
        const double x = kPi * i / 512.0;
        const double cur = p.eval_G(x);
        if (x <= xi - 1e-3) CHECK(cur >= prev - 1e-12);
        if (x - kPi / 512.0 >= xi + 1e-3) CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("odd reflection extends g consistently") {
    const Potential p = landau_lifshitz(1.0, 0.25);
    for (double t : {0.1, 0.5, 1.0}) {
        CHECK(p.g(-t) == doctest::Approx(-p.g(t)).epsilon(1e-14));
        CHECK(p.g(kPi + t) == doctest::Approx(-p.g(kPi - t)).epsilon(1e-14));
    }
    // for this family the reflected extension agrees with the formula itself
    CHECK(p.g(kPi + 0.3) ==
          doctest::Approx((0.25 + std::cos(kPi + 0.3)) * std::sin(kPi + 0.3))
              .epsilon(1e-12));
}

TEST_CASE("eval_G domain") {
    const Potential p = landau_lifshitz(1.0, 0.25);
    CHECK_THROWS_AS(p.eval_G(-0.5), std::domain_error);
    CHECK_THROWS_AS(p.eval_G(kPi + 0.5), std::domain_error);
    CHECK(p.G_ext(kPi + 1e-9) == doctest::Approx(p.eval_G(kPi - 1e-9)));
}

TEST_CASE("supplied G text is normalized to G(pi) = 0") {
    PotentialSpec s = ll_spec(1.0, 0.25);
    // same primitive shifted by a constant
    s.G_text = "lambda/2*sin(x)^2 - omega*(1+cos(x)) + 3";
    const Potential p = build_potential(s);
    CHECK(std::fabs(p.eval_G(kPi)) < 1e-12);
    CHECK(p.eval_G(0.0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("unbound parameter rejected") {
    PotentialSpec s;
    s.g_text = "(omega + lambda*cos(x))*sin(x)";
    s.params = {{"lambda", 1.0}};
    CHECK_THROWS_AS(build_potential(s), std::invalid_argument);
}
