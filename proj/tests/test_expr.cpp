#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "equivar/expr.hpp"

using equivar::Expr;
using equivar::ExprError;

namespace {
constexpr double kPi = 3.14159265358979323846;

// deterministic LCG for sample points
struct Lcg {
    uint64_t s;
    double next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return double(s >> 11) / double(1ULL << 53);
    }
};
}  // namespace

TEST_CASE("basic evaluation") {
    CHECK(Expr::parse("sin(x)").eval(kPi / 2, {}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::fabs(Expr::parse("(omega + lambda*cos(x))*sin(x)")
                        .eval(kPi, {{"lambda", 1.0}, {"omega", 0.25}})) < 1e-15);
    CHECK(Expr::parse("2*arctan(x^2)").eval(1.0, {}) ==
          doctest::Approx(kPi / 2).epsilon(1e-15));
    CHECK(Expr::parse("x^3").eval(2.0, {}) == 8.0);
    CHECK(Expr::parse("cos(x)").eval(0.0, {}) == 1.0);
}

TEST_CASE("precedence") {
    CHECK(Expr::parse("2+3*4").eval(0.0, {}) == 14.0);
    // unary minus applies to the whole power
    CHECK(Expr::parse("-x^2").eval(3.0, {}) == -9.0);
    CHECK(Expr::parse("2^-3").eval(0.0, {}) == 0.125);
    // right-associative power
    CHECK(Expr::parse("2^3^2").eval(0.0, {}) == 512.0);
    CHECK(Expr::parse("2-3-4").eval(0.0, {}) == -5.0);
    CHECK(Expr::parse("12/3/2").eval(0.0, {}) == 2.0);
}

TEST_CASE("syntax errors carry byte offsets") {
    try {
        Expr::parse("sin(");
        FAIL("expected a parse error");
    } catch (const ExprError& e) {
        CHECK(e.offset() == 4);
    }
    CHECK_THROWS_AS(Expr::parse("2x"), ExprError);      // no implicit product
    CHECK_THROWS_AS(Expr::parse("foo(x)"), ExprError);  // unknown function
    CHECK_THROWS_AS(Expr::parse(""), ExprError);
    CHECK_THROWS_AS(Expr::parse("1+"), ExprError);
    CHECK_THROWS_AS(Expr::parse("(1+2"), ExprError);
}

TEST_CASE("eval errors") {
    CHECK_THROWS_AS(Expr::parse("log(x)").eval(0.0, {}), ExprError);
    CHECK_THROWS_AS(Expr::parse("sqrt(x)").eval(-1.0, {}), ExprError);
    CHECK_THROWS_AS(Expr::parse("a*x").eval(1.0, {}), ExprError);  // unbound
    // overflow propagates IEEE-style rather than throwing
    CHECK(std::isinf(Expr::parse("exp(x)").eval(1e9, {})));
}

TEST_CASE("free identifiers") {
    const Expr e = Expr::parse("(omega + lambda*cos(x))*sin(x)");
    CHECK(e.free_params() == std::set<std::string>{"lambda", "omega"});
    CHECK(e.uses_x());
    CHECK_FALSE(Expr::parse("omega").uses_x());
}

TEST_CASE("print/parse round-trip evaluates bit-identically") {
    const char* sources[] = {
        "sin(x)+cos(x)*tan(x/4)",
        "(omega + lambda*cos(x))*sin(x)",
        "-x^2 + 2^-x",
        "exp(-x)*log(x+2)+sqrt(abs(x))",
        "a*x^3 - b/x + arctan(a*b*x)",
        "1.5e-3*x + 2.25",
        "-(x - a)^3",
        "x/(1+x^2)^2",
    };
    Lcg rng{20260809};
    for (const char* src : sources) {
        const Expr e1 = Expr::parse(src);
        const Expr e2 = Expr::parse(e1.print());
        CHECK(e1.print() == e2.print());
        for (int i = 0; i < 100; ++i) {
            const double x = 4.0 * rng.next() + 0.1;
            const std::map<std::string, double> params = {
                {"a", rng.next() + 0.5}, {"b", rng.next() + 0.5},
                {"omega", rng.next()},   {"lambda", rng.next() + 0.5}};
            const double v1 = e1.eval(x, params);
            const double v2 = e2.eval(x, params);
            CHECK(v1 == v2);  // exactly: same tree, same operations
        }
    }
}
