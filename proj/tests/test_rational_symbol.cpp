#include "psdo/rational_symbol.hpp"

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

using namespace psdo;
using testutil::random_poly;

namespace {
Poly x() { return Poly::variable(1, Block::x, 0); }
Poly xi() { return Poly::variable(1, Block::xi, 0); }
Poly oscillator() { return Poly::constant(1, RatC(1)) + x() * x() + xi() * xi(); }
} // namespace

TEST_CASE("derivative of 1/p") {
    Poly p = oscillator();
    RationalSymbol q = RationalSymbol::reciprocal(p);
    RationalSymbol dq = q.derive(Block::xi, {1});
    // -2 xi / p^2
    RationalSymbol expect(xi().scaled(RatC(Rational(-2))), p, 2);
    CHECK(dq.equals(expect));

    // quotient-rule oracle at random points
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> c(-3, 3);
    for (int t = 0; t < 10; ++t) {
        double xs[] = {c(rng)}, xis[] = {c(rng)};
        double denom = 1 + xs[0] * xs[0] + xis[0] * xis[0];
        double expect_val = -2 * xis[0] / (denom * denom);
        CHECK(dq.eval(xs, xis).real() == Catch::Approx(expect_val).epsilon(1e-12));
        CHECK(dq.eval(xs, xis).imag() == 0.0);
    }
}

TEST_CASE("power alignment in addition") {
    Poly p = oscillator();
    RationalSymbol one_over_p = RationalSymbol::reciprocal(p);
    RationalSymbol one_over_p2 = one_over_p * one_over_p;
    CHECK(one_over_p2.power() == 2);
    RationalSymbol sum = one_over_p + one_over_p2;
    // (p + 1)/p^2
    RationalSymbol expect(p + Poly::constant(1, RatC(1)), p, 2);
    CHECK(sum.equals(expect));
}

TEST_CASE("mixed bases are rejected") {
    RationalSymbol a = RationalSymbol::reciprocal(oscillator());
    RationalSymbol b = RationalSymbol::reciprocal(oscillator() + x());
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    CHECK_THROWS_AS(a * b, std::invalid_argument);
}

TEST_CASE("derivatives commute on random rational symbols") {
    std::mt19937_64 rng(12);
    Poly p = oscillator();
    for (int t = 0; t < 40; ++t) {
        RationalSymbol r(random_poly(rng, 1, 4, 4), p, 1 + static_cast<int>(rng() % 3));
        RationalSymbol a = r.derive(Block::x, {1}).derive(Block::xi, {1});
        RationalSymbol b = r.derive(Block::xi, {1}).derive(Block::x, {1});
        CHECK(a.equals(b));
    }
}

TEST_CASE("D derivative carries (-i)^{steps}") {
    Poly p = oscillator();
    RationalSymbol q = RationalSymbol::reciprocal(p);
    RationalSymbol Dq = q.derive(Block::x, {1}, Deriv::D);
    // D_x (1/p) = -i * (-2x/p^2) = 2ix/p^2
    RationalSymbol expect(x().scaled(RatC(Rational(0), Rational(2))), p, 2);
    CHECK(Dq.equals(expect));
}

TEST_CASE("zero handling") {
    Poly p = oscillator();
    RationalSymbol z(Poly(1), p, 5);
    CHECK(z.is_zero());
    CHECK(z.power() == 0);
    RationalSymbol q = RationalSymbol::reciprocal(p);
    CHECK((q - q).is_zero());
    CHECK((z * q).is_zero());
}
