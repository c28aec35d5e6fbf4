#include "psdo/io.hpp"

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

using namespace psdo;
using testutil::random_poly;

TEST_CASE("polynomial symbols round trip bit exactly") {
    std::mt19937_64 rng(61);
    for (int t = 0; t < 30; ++t) {
        int dim = 1 + static_cast<int>(rng() % 3);
        Poly p = random_poly(rng, dim, 5, 6);
        json j = poly_to_json(p);
        json j2 = poly_to_json(std::get<Poly>(symbol_from_json(j)));
        CHECK(j.dump() == j2.dump());
        CHECK(std::get<Poly>(symbol_from_json(j2)) == p);
    }
}

TEST_CASE("amplitudes carry y exponents") {
    std::mt19937_64 rng(62);
    Poly amp = random_poly(rng, 2, 4, 5, /*amplitude=*/true);
    json j = poly_to_json(amp);
    CHECK(j["representation"] == "amplitude");
    Poly back = std::get<Poly>(symbol_from_json(j));
    CHECK(back == amp);
    CHECK(back.is_amplitude());
}

TEST_CASE("rational symbols round trip") {
    Poly p = Poly::constant(1, RatC(1)) + Poly::variable(1, Block::x, 0) * Poly::variable(1, Block::x, 0);
    RationalSymbol r(Poly::variable(1, Block::xi, 0).scaled(RatC(Rational(-2))), p, 2);
    json j = symbol_to_json(GenericSymbol(r));
    auto back = std::get<RationalSymbol>(symbol_from_json(j));
    CHECK(back.equals(r));
    CHECK(back.power() == 2);
}

TEST_CASE("expression symbols round trip through their source") {
    auto e = ExprSymbol::parse(1, "exp(-(x^2+xi^2))");
    json j = symbol_to_json(GenericSymbol(e));
    auto back = std::get<ExprSymbol>(symbol_from_json(j));
    double xs[] = {0.6}, xis[] = {-0.9};
    CHECK(back.eval(xs, xis) == e.eval(xs, xis));

    auto scaled = e.with_prefactor({0.0, 2.0});
    auto back2 = std::get<ExprSymbol>(symbol_from_json(symbol_to_json(GenericSymbol(scaled))));
    CHECK(back2.eval(xs, xis) == scaled.eval(xs, xis));
}

TEST_CASE("malformed multi-index lengths are rejected") {
    json j = {{"dim", 2},
              {"representation", "poly"},
              {"terms", json::array({{{"x", {1}}, {"xi", {0, 0}}, {"re", "1"}, {"im", "0"}}})}};
    CHECK_THROWS_WITH(symbol_from_json(j), Catch::Matchers::ContainsSubstring("length"));

    json neg = {{"dim", 1},
                {"representation", "poly"},
                {"terms", json::array({{{"x", {-1}}, {"xi", {0}}, {"re", "1"}, {"im", "0"}}})}};
    CHECK_THROWS_WITH(symbol_from_json(neg), Catch::Matchers::ContainsSubstring("negative"));

    json stray = {{"dim", 1},
                  {"representation", "poly"},
                  {"terms", json::array({{{"x", {1}}, {"y", {1}}, {"xi", {0}}, {"re", "1"}, {"im", "0"}}})}};
    CHECK_THROWS_WITH(symbol_from_json(stray), Catch::Matchers::ContainsSubstring("y"));

    json badrep = {{"dim", 1}, {"representation", "matrix"}};
    CHECK_THROWS(symbol_from_json(badrep));
}

TEST_CASE("quantized symbols carry tau and convention") {
    QuantizedSymbol q(Poly::variable(1, Block::x, 0), Rational(1, 3), Convention::paper, 2);
    json j = quantized_to_json(q);
    QuantizedSymbol back = quantized_from_json(j);
    CHECK(back.tau == Rational(1, 3));
    CHECK(back.convention == Convention::paper);
    CHECK(back.twopi_power == 2);
    CHECK(back.symbol == q.symbol);
}

TEST_CASE("file save and load") {
    Poly p = Poly::variable(1, Block::x, 0);
    std::string path = "/tmp/psdo_test_symbol.json";
    save_json(poly_to_json(p), path);
    CHECK(std::get<Poly>(symbol_from_json(load_json(path))) == p);
    CHECK_THROWS(load_json("/tmp/does_not_exist_psdo.json"));
}

TEST_CASE("test-function specs") {
    auto h3 = parse_testfn_spec("hermite:k=3");
    CHECK(h3.coeff.size() == 1);
    CHECK(h3.coeff.count({3}) == 1);

    auto g = parse_testfn_spec("gaussian:center=0,width=1");
    CHECK(g.coeff.count({0}) == 1);
    CHECK(g.coeff.count({1}) == 0); // centered gaussian has even modes only

    auto g2 = parse_testfn_spec("gaussian:center=0.5,width=2");
    CHECK(g2.coeff.size() > 3);

    CHECK_THROWS(parse_testfn_spec("plane-wave:k=1"));
    CHECK_THROWS(parse_testfn_spec("hermite"));
}
