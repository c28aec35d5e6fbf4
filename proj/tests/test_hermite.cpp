#include "psdo/hermite.hpp"

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

using namespace psdo;
using testutil::random_poly;

namespace {
Poly x(int d = 1, int ax = 0) { return Poly::variable(d, Block::x, ax); }
Poly xi(int d = 1, int ax = 0) { return Poly::variable(d, Block::xi, ax); }
const Rational half(1, 2);

// numeric derivative of h_k on a fine grid, for the ladder cross-check
double hermite_derivative_fd(int k, double t) {
    double h = 1e-5;
    return (hermite_function(k, t + h) - hermite_function(k, t - h)) / (2 * h) -
           (hermite_function(k, t + 2 * h) - hermite_function(k, t - 2 * h) -
            2 * (hermite_function(k, t + h) - hermite_function(k, t - h))) / (6 * h);
}
} // namespace

TEST_CASE("ladder relations against numeric differentiation") {
    // h_k' = sqrt(k/2) h_{k-1} - sqrt((k+1)/2) h_{k+1}, max error <= 1e-8 on [-12,12]
    for (int k = 0; k <= 25; ++k) {
        double maxerr = 0;
        for (double t = -12; t <= 12; t += 0.37) {
            double ladder = (k > 0 ? std::sqrt(k / 2.0) * hermite_function(k - 1, t) : 0.0) -
                            std::sqrt((k + 1) / 2.0) * hermite_function(k + 1, t);
            maxerr = std::max(maxerr, std::abs(ladder - hermite_derivative_fd(k, t)));
        }
        CHECK(maxerr <= 1e-8);
    }
}

TEST_CASE("harmonic oscillator eigenrelation") {
    // (x^2 + D^2) h_k = (2k+1) h_k
    DiffOperator T = DiffOperator::from_left_symbol(x() * x() + xi() * xi());
    for (int k : {0, 1, 5, 12}) {
        auto u = HermiteExpansion::mode1d(k);
        auto v = T.apply(u);
        auto defect = v - u.scaled(2.0 * k + 1.0);
        CHECK(defect.norm() <= 1e-12 * (2 * k + 1));
    }
}

TEST_CASE("identity and multiplication operators") {
    DiffOperator id = DiffOperator::from_left_symbol(Poly::constant(1, RatC(1)));
    auto u = HermiteExpansion::mode1d(3) + HermiteExpansion::mode1d(0).scaled({0.5, -0.25});
    CHECK((id.apply(u) - u).norm() == 0.0);

    // x h_1 on the grid: ladder result vs pointwise multiply
    DiffOperator mx = DiffOperator::from_left_symbol(x());
    auto v = mx.apply(HermiteExpansion::mode1d(1));
    for (double t = -6; t <= 6; t += 0.17) {
        double direct = t * hermite_function(1, t);
        CHECK(std::abs(eval_expansion(v, t).real() - direct) <= 1e-10);
    }
}

TEST_CASE("xD on h_1 matches numeric differentiation on a grid") {
    DiffOperator T = DiffOperator::from_left_symbol(x() * xi());
    auto v = T.apply(HermiteExpansion::mode1d(1));
    double maxerr = 0;
    for (double t = -8; t <= 8; t += 1.0 / 128) {
        std::complex<double> expect = t * std::complex<double>(0, -1) * hermite_derivative_fd(1, t);
        maxerr = std::max(maxerr, std::abs(eval_expansion(v, t) - expect));
    }
    CHECK(maxerr <= 1e-8);
}

TEST_CASE("pairing") {
    auto h0 = HermiteExpansion::mode1d(0), h1 = HermiteExpansion::mode1d(1);
    CHECK(pairing(h0, h0) == std::complex<double>(1, 0));
    CHECK(pairing(h0, h1) == std::complex<double>(0, 0));

    std::mt19937_64 rng(17);
    for (int t = 0; t < 20; ++t) {
        auto u = random_expansion(rng, 1, 12, 5), v = random_expansion(rng, 1, 12, 5);
        CHECK(pairing(u, v) == pairing(v, u));

        // <xDu, v> + <u, xDv> - i<u,v> = 0  (transpose of xD is -xD + i)
        DiffOperator T = DiffOperator::from_left_symbol(x() * xi());
        std::complex<double> defect =
            pairing(T.apply(u), v) + pairing(u, T.apply(v)) - std::complex<double>(0, 1) * pairing(u, v);
        CHECK(std::abs(defect) <= 1e-12 * (1 + std::abs(pairing(T.apply(u), v))));
    }
}

TEST_CASE("quantize_to_operator") {
    // a = xi at any tau: the operator D
    for (const Rational& t : {Rational(0), half, Rational(2)}) {
        DiffOperator T = quantize_to_operator(xi(), t);
        CHECK(T.left_symbol() == xi());
    }
    // a = x xi + i/2 at tau = 1/2 is exactly x D
    Poly sym = x() * xi() + Poly::constant(1, RatC(Rational(0), half));
    DiffOperator T = quantize_to_operator(sym, half);
    CHECK(T.left_symbol() == x() * xi());
    // ladder check against (xD + Dx)/2
    DiffOperator xD = DiffOperator::from_left_symbol(x() * xi());
    DiffOperator Dx = DiffOperator::from_left_symbol(xi()).compose(DiffOperator::from_left_symbol(x()));
    std::mt19937_64 rng(3);
    auto u = random_expansion(rng, 1, 10, 6);
    auto avg = (xD.apply(u) + Dx.apply(u)).scaled(0.5);
    DiffOperator W = quantize_to_operator(x() * xi(), half);
    CHECK((W.apply(u) - avg).norm() <= 1e-13 * avg.norm());

    // a = x at tau = 1: multiplication by x
    CHECK(quantize_to_operator(x(), Rational(1)).left_symbol() == x());
}

TEST_CASE("normal ordering is a ring homomorphism onto left symbols") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 50; ++trial) {
        int dim = trial % 4 == 0 ? 2 : 1;
        Poly pa = random_poly(rng, dim, 3, 3), pb = random_poly(rng, dim, 3, 3);
        DiffOperator S = DiffOperator::from_left_symbol(pa), T = DiffOperator::from_left_symbol(pb);
        Poly composed = S.compose(T).left_symbol();
        QuantizedSymbol qa(pa, Rational(0)), qb(pb, Rational(0));
        CHECK(composed == compose_tau(qa, qb).symbol);
    }
}

TEST_CASE("operator composition is associative (exact)") {
    std::mt19937_64 rng(1235);
    for (int trial = 0; trial < 25; ++trial) {
        DiffOperator A = DiffOperator::from_left_symbol(random_poly(rng, 1, 3, 3));
        DiffOperator B = DiffOperator::from_left_symbol(random_poly(rng, 1, 3, 3));
        DiffOperator C = DiffOperator::from_left_symbol(random_poly(rng, 1, 3, 3));
        CHECK(A.compose(B).compose(C).left_symbol() == A.compose(B.compose(C)).left_symbol());
    }
}

TEST_CASE("operator-level quantization equivalence") {
    auto test_set = basis_test_set(1, 12);
    std::mt19937_64 rng(55);
    for (int t = 0; t < 8; ++t) test_set.push_back(random_expansion(rng, 1, 12, 5));

    auto e = oracle_quantization_error(x() * xi(), Rational(0), half, test_set);
    CHECK(e.max_rel <= 1e-12);

    const std::vector<Rational> taus{Rational(-1), Rational(0), Rational(1, 3), half, Rational(1), Rational(2)};
    for (int trial = 0; trial < 10; ++trial) {
        Poly p = random_poly(rng, 1, 4, 4);
        auto err = oracle_quantization_error(p, taus[rng() % taus.size()], taus[rng() % taus.size()], test_set);
        CHECK(err.max_rel <= 1e-10);
    }
}

TEST_CASE("operator-level composition and transpose") {
    auto test_set = basis_test_set(1, 10);
    std::mt19937_64 rng(56);
    for (int t = 0; t < 6; ++t) test_set.push_back(random_expansion(rng, 1, 10, 4));

    QuantizedSymbol a(xi(), Rational(0)), b(x(), Rational(0));
    CHECK(oracle_composition_error(a, b, compose_tau(a, b), test_set).max_rel <= 1e-12);

    CHECK(oracle_transpose_error(QuantizedSymbol(Poly::constant(1, RatC(4)), half), test_set).max_rel == 0.0);
    CHECK(oracle_transpose_error(QuantizedSymbol(x() * xi(), Rational(0)), test_set).max_rel <= 1e-12);

    // transpose of a composition is the reversed composition of transposes
    for (int trial = 0; trial < 10; ++trial) {
        QuantizedSymbol p(random_poly(rng, 1, 3, 3), half), q(random_poly(rng, 1, 3, 3), half);
        auto lhs = transpose_tau(compose_tau(p, q));
        auto rhs = compose_tau(transpose_tau(q), transpose_tau(p));
        DiffOperator L = quantize_to_operator(lhs), R = quantize_to_operator(rhs);
        for (const auto& u : test_set) {
            auto diff = L.apply(u) - R.apply(u);
            CHECK(diff.norm() <= 1e-10 * std::max(1.0, L.apply(u).norm()));
        }
    }
}

TEST_CASE("amplitude oracle") {
    auto test_set = basis_test_set(1, 8);
    std::mt19937_64 rng(57);
    for (int t = 0; t < 5; ++t) test_set.push_back(random_expansion(rng, 1, 8, 4));

    // amplitude x^a y^b xi^g -> u |-> x^a D^g (x^b u), against the reduction route
    const std::vector<Rational> taus{Rational(0), half, Rational(1), Rational(1, 3)};
    for (int trial = 0; trial < 12; ++trial) {
        Poly amp = random_poly(rng, 1, 4, 3, /*amplitude=*/true);
        auto e = oracle_amplitude_error(amp, taus[rng() % taus.size()], test_set);
        INFO(e.worst);
        CHECK(e.max_rel <= 1e-10);
    }
}

TEST_CASE("tensor modes in d = 2") {
    // (x1^2 + x2^2 + D1^2 + D2^2) h_{(j,k)} = (2j + 2k + 2) h_{(j,k)}
    Poly osc2 = x(2, 0) * x(2, 0) + x(2, 1) * x(2, 1) + xi(2, 0) * xi(2, 0) + xi(2, 1) * xi(2, 1);
    DiffOperator T = DiffOperator::from_left_symbol(osc2);
    auto u = HermiteExpansion::mode(2, {1, 3});
    auto defect = T.apply(u) - u.scaled(2.0 * (1 + 3) + 2.0);
    CHECK(defect.norm() <= 1e-12 * 10);
}
