#include "psdo/formal_sum.hpp"
#include "psdo/parametrix.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace psdo;

namespace {
Poly x() { return Poly::variable(1, Block::x, 0); }
Poly xi() { return Poly::variable(1, Block::xi, 0); }
Poly oscillator() { return Poly::constant(1, RatC(1)) + x() * x() + xi() * xi(); }
} // namespace

TEST_CASE("assembly keeps only the zeroth term near the origin") {
    FormalSum fs(1, 0, 1, 1);
    fs.push(GenericSymbol(x() * xi()));
    fs.push(GenericSymbol(x()));
    fs.push(GenericSymbol(xi()));
    YoungConjugate conj(WeightFunction::gevrey(0.5));
    CutoffFamily cutoffs(1.0);
    auto assembled = assemble_formal_sum(fs, cutoffs, conj);

    double A11 = cutoffs.radius(conj, 1, 1);
    double xs[] = {A11}, xis[] = {A11 * 0.9}; // |pt| < 2 A_{1,1}
    CHECK(assembled.active_terms(xs, xis) == 1);
    std::complex<double> a0 = (x() * xi()).eval(xs, xis);
    CHECK(assembled.eval(xs, xis) == a0);
}

TEST_CASE("constant formal sum assembles to the constant") {
    FormalSum fs(1, 0, 1, 1);
    fs.push(GenericSymbol(Poly::constant(1, RatC(1))));
    fs.push(GenericSymbol(Poly(1)));
    fs.push(GenericSymbol(Poly(1)));
    YoungConjugate conj(WeightFunction::gevrey(0.5));
    auto assembled = assemble_formal_sum(fs, CutoffFamily(1.0), conj);
    for (double r : {0.1, 1.0, 7.0, 300.0}) {
        double xs[] = {r}, xis[] = {-r};
        CHECK(assembled.eval(xs, xis) == std::complex<double>(1, 0));
    }
}

TEST_CASE("parametrix terms assemble to the plain sum far out") {
    Poly p = oscillator();
    auto res = parametrix_terms(p, Rational(0), 3);
    FormalSum fs(1, 0, 1, 1);
    for (const auto& q : res.terms) fs.push(GenericSymbol(q));
    YoungConjugate conj(WeightFunction::gevrey(0.5));
    auto assembled = assemble_formal_sum(fs, CutoffFamily(1.0), conj);

    double xs[] = {24.0}, xis[] = {18.0};
    std::complex<double> direct = 0;
    for (const auto& q : res.terms) direct += q.eval(xs, xis);
    CHECK(std::abs(assembled.eval(xs, xis) - direct) <= 1e-6 * std::abs(direct));
    CHECK(assembled.active_terms(xs, xis) == 4);
}

TEST_CASE("assembled value is independent of truncation past the active cutoffs") {
    Poly p = oscillator();
    auto res = parametrix_terms(p, Rational(0), 5);
    YoungConjugate conj(WeightFunction::gevrey(0.5));
    CutoffFamily cutoffs(1.0);
    double xs[] = {3.0}, xis[] = {1.5};

    FormalSum fs4(1, 0, 1, 1), fs6(1, 0, 1, 1);
    for (int j = 0; j <= 3; ++j) fs4.push(GenericSymbol(res.terms[j]));
    for (int j = 0; j <= 5; ++j) fs6.push(GenericSymbol(res.terms[j]));
    auto a4 = assemble_formal_sum(fs4, cutoffs, conj);
    auto a6 = assemble_formal_sum(fs6, cutoffs, conj);
    REQUIRE(a6.active_terms(xs, xis) <= 4); // phi_j vanishes at this point for j > 3
    CHECK(a4.eval(xs, xis) == a6.eval(xs, xis));
}

TEST_CASE("equivalence: identical sums have zero suprema") {
    FormalSum fs(1, 0, 1, 1);
    fs.push(GenericSymbol(Poly::constant(1, RatC(1))));
    auto rep = verify_equivalence(fs, fs, WeightFunction::gevrey(0.5), 6);
    CHECK(rep.equivalent);
    for (const auto& row : rep.sup)
        for (double v : row) CHECK(v == 0.0);
}

TEST_CASE("equivalence: fast-decaying perturbation is equivalent") {
    FormalSum fs1(1, 0, 1, 1), fs2(1, 0, 1, 1);
    fs1.push(GenericSymbol(Poly::constant(1, RatC(1))));
    fs2.push(GenericSymbol(ExprSymbol::parse(1, "1 + (1+x^2+xi^2)^-5")));
    auto rep = verify_equivalence(fs1, fs2, WeightFunction::gevrey(0.5), 10);
    CHECK(rep.equivalent);
}

TEST_CASE("equivalence: constant shift is flagged") {
    FormalSum fs1(1, 0, 1, 1), fs2(1, 0, 1, 1);
    fs1.push(GenericSymbol(Poly::constant(1, RatC(1))));
    fs2.push(GenericSymbol(Poly::constant(1, RatC(2))));
    auto rep = verify_equivalence(fs1, fs2, WeightFunction::gevrey(0.5), 10);
    CHECK_FALSE(rep.equivalent);
}

TEST_CASE("class parameters must match") {
    FormalSum fs1(1, 0, 1, 1), fs2(1, 1, 1, 1);
    fs1.push(GenericSymbol(Poly(1)));
    fs2.push(GenericSymbol(Poly(1)));
    CHECK_THROWS_AS(verify_equivalence(fs1, fs2, WeightFunction::gevrey(0.5), 4), std::invalid_argument);
}

TEST_CASE("class constant fit: constants") {
    AnnuliSpec region;
    region.rmin = 2;
    region.rmax = 100;
    auto fit = estimate_class_constants(GenericSymbol(Poly::constant(1, RatC(1))),
                                        WeightFunction::gevrey(0.5), 0, 1, region, 4);
    CHECK_FALSE(fit.diverged);
    for (const auto& [n, C] : fit.constants) CHECK(C == Catch::Approx(1.0));
}

TEST_CASE("class constant fit: x xi with dominating order") {
    AnnuliSpec region;
    region.rmin = 2;
    region.rmax = 100;
    auto fit = estimate_class_constants(GenericSymbol(x() * xi()), WeightFunction::gevrey(0.5), 3, 1,
                                        region, 4);
    CHECK_FALSE(fit.diverged);
    for (const auto& [n, C] : fit.constants) {
        CHECK(std::isfinite(C));
        CHECK(C <= 100.0);
    }
}

TEST_CASE("class constant fit: exp(x^2) with m = 1 diverges") {
    AnnuliSpec region;
    region.rmin = 2;
    region.rmax = 100;
    auto fit = estimate_class_constants(GenericSymbol(ExprSymbol::parse(1, "exp(x^2)")),
                                        WeightFunction::gevrey(0.5), 1, 1, region, 4);
    CHECK(fit.diverged);
}
