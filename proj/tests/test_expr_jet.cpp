#include "psdo/expr.hpp"
#include "psdo/symbol_variant.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using namespace psdo;

namespace {
// central finite differences with one Richardson step, for the jet oracle
double fd_partial(const std::function<double(double, double)>& f, int dx, int dxi, double x, double xi,
                  double h = 1e-2) {
    if (dx > 0) {
        auto g = [&](double a, double b) {
            double hh = h;
            double d1 = (f(a + hh, b) - f(a - hh, b)) / (2 * hh);
            double d2 = (f(a + hh / 2, b) - f(a - hh / 2, b)) / hh;
            return (4 * d2 - d1) / 3;
        };
        return fd_partial(g, dx - 1, dxi, x, xi, h);
    }
    if (dxi > 0) {
        auto g = [&](double a, double b) {
            double hh = h;
            double d1 = (f(a, b + hh) - f(a, b - hh)) / (2 * hh);
            double d2 = (f(a, b + hh / 2) - f(a, b - hh / 2)) / hh;
            return (4 * d2 - d1) / 3;
        };
        return fd_partial(g, dx, dxi - 1, x, xi, h);
    }
    return f(x, xi);
}
} // namespace

TEST_CASE("exp(x) jet at the origin") {
    auto a = ExprSymbol::parse(1, "exp(x)");
    double xs[] = {0.0}, xis[] = {0.0};
    Jet j = a.jet(xs, xis, 3);
    for (int k = 0; k <= 3; ++k) {
        CHECK(ExprSymbol::partial(j, {k}, {0}).real() == Catch::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("bilinear symbol jet") {
    auto a = ExprSymbol::parse(1, "x*xi");
    double xs[] = {1.0}, xis[] = {2.0};
    Jet j = a.jet(xs, xis, 2);
    CHECK(ExprSymbol::partial(j, {1}, {1}).real() == Catch::Approx(1.0));
    CHECK(ExprSymbol::partial(j, {2}, {0}).real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(ExprSymbol::partial(j, {0}, {0}).real() == Catch::Approx(2.0));
}

TEST_CASE("gaussian jet against finite differences") {
    auto a = ExprSymbol::parse(1, "exp(-(x^2+xi^2))");
    double xs[] = {0.5}, xis[] = {0.5};
    Jet j = a.jet(xs, xis, 4);
    auto f = [](double x, double xi) { return std::exp(-(x * x + xi * xi)); };
    for (int dx = 0; dx <= 4; ++dx)
        for (int dxi = 0; dx + dxi <= 4; ++dxi) {
            double expect = fd_partial(f, dx, dxi, 0.5, 0.5);
            double got = ExprSymbol::partial(j, {dx}, {dxi}).real();
            INFO("dx=" << dx << " dxi=" << dxi);
            CHECK(std::abs(got - expect) <= 1e-6 * (1 + std::abs(expect)));
        }
}

TEST_CASE("jets agree with symbolic polynomial derivatives") {
    Poly p = Poly::variable(1, Block::x, 0) * Poly::variable(1, Block::xi, 0);
    p += (Poly::variable(1, Block::x, 0) * Poly::variable(1, Block::x, 0)).scaled(RatC(Rational(3)));
    auto e = ExprSymbol::parse(1, "x*xi + 3*x^2");
    double xs[] = {0.7}, xis[] = {-1.3};
    DerivativeBank pb(GenericSymbol(p), 4), eb(GenericSymbol(e), 4);
    PartialTable pt = pb.at(xs, xis), et = eb.at(xs, xis);
    for (size_t i = 0; i < pt.raw().size(); ++i) {
        double expect = pt.raw()[i].real();
        CHECK(std::abs(et.raw()[i].real() - expect) <= 1e-12 * (1 + std::abs(expect)));
        CHECK(std::abs(et.raw()[i].imag()) <= 1e-14);
    }
}

TEST_CASE("negative powers through jet inversion") {
    auto a = ExprSymbol::parse(1, "(1+x^2+xi^2)^-5");
    double xs[] = {1.5}, xis[] = {-0.5};
    double direct = std::pow(1 + 1.5 * 1.5 + 0.25, -5);
    CHECK(a.eval(xs, xis).real() == Catch::Approx(direct).epsilon(1e-13));

    auto f = [](double x, double xi) { return std::pow(1 + x * x + xi * xi, -5.0); };
    Jet j = a.jet(xs, xis, 3);
    for (int dx = 0; dx <= 2; ++dx)
        for (int dxi = 0; dx + dxi <= 2; ++dxi) {
            double expect = fd_partial(f, dx, dxi, 1.5, -0.5, 1e-3);
            CHECK(ExprSymbol::partial(j, {dx}, {dxi}).real() == Catch::Approx(expect).margin(1e-6));
        }
}

TEST_CASE("symbolic expression derivatives") {
    auto a = ExprSymbol::parse(1, "exp(x^2)");
    auto dx = a.derive({1}, {0}, false); // 2x exp(x^2)
    double xs[] = {0.8}, xis[] = {0.0};
    CHECK(dx.eval(xs, xis).real() == Catch::Approx(2 * 0.8 * std::exp(0.64)).epsilon(1e-13));

    // D convention multiplies by (-i)^{steps}
    auto Dx = a.derive({1}, {0}, true);
    auto v = Dx.eval(xs, xis);
    CHECK(v.real() == Catch::Approx(0.0).margin(1e-15));
    CHECK(v.imag() == Catch::Approx(-2 * 0.8 * std::exp(0.64)).epsilon(1e-13));
}

TEST_CASE("parser rejects unsupported nodes") {
    CHECK_THROWS_AS(ExprSymbol::parse(1, "sin(x)"), std::invalid_argument);
    CHECK_THROWS_AS(ExprSymbol::parse(1, "x + "), std::invalid_argument);
    CHECK_THROWS_AS(ExprSymbol::parse(1, "x ) y"), std::invalid_argument);
    CHECK_THROWS_AS(ExprSymbol::parse(2, "x"), std::invalid_argument);  // needs x1/x2 in d=2
    CHECK_THROWS_AS(ExprSymbol::parse(1, "x3"), std::invalid_argument); // axis out of range
    CHECK_THROWS_AS(ExprSymbol::parse(1, "x^xi"), std::invalid_argument);
    CHECK_NOTHROW(ExprSymbol::parse(2, "x1*xi2 + exp(-(x2^2))"));
}

TEST_CASE("jet order guard") {
    auto a = ExprSymbol::parse(1, "x");
    double xs[] = {0.0}, xis[] = {0.0};
    CHECK_THROWS_AS(a.jet(xs, xis, 13), std::invalid_argument);
}

TEST_CASE("round trip through to_string") {
    auto a = ExprSymbol::parse(2, "exp(-(x1^2+xi1^2)) + 2*x2^3");
    auto b = ExprSymbol::parse(2, a.to_string());
    double xs[] = {0.3, -1.1}, xis[] = {0.9, 0.2};
    CHECK(a.eval(xs, xis).real() == Catch::Approx(b.eval(xs, xis).real()).epsilon(1e-15));
}
