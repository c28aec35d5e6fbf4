#ifndef PSDO_RATIONAL_SYMBOL_HPP
#define PSDO_RATIONAL_SYMBOL_HPP

#include "psdo/polynomial.hpp"

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>

namespace psdo {

/// Rational symbol N(x,xi) / p(x,xi)^k over a fixed base polynomial p. The
/// parametrix recursion only ever produces this shape, and it is closed under
/// derivation: d(N/p^k) = (dN p - k N dp) / p^{k+1}. Addition aligns powers
/// over the shared base; mixing bases is a domain error.
class RationalSymbol {
public:
    RationalSymbol() = default;
    RationalSymbol(Poly numerator, Poly base, int power)
        : num_(std::move(numerator)), base_(std::move(base)), power_(power) {
        if (base_.is_zero()) throw std::invalid_argument("RationalSymbol: zero base");
        if (power < 0) throw std::invalid_argument("RationalSymbol: negative power");
        if (num_.dim() != base_.dim()) throw std::invalid_argument("RationalSymbol: dim mismatch");
        if (num_.is_zero()) power_ = 0;
    }
    static RationalSymbol from_poly(Poly p, Poly base) {
        return RationalSymbol(std::move(p), std::move(base), 0);
    }
    static RationalSymbol reciprocal(const Poly& base) {
        return RationalSymbol(Poly::constant(base.dim(), RatC(1)), base, 1);
    }

    int dim() const { return num_.dim(); }
    const Poly& numerator() const { return num_; }
    const Poly& base() const { return base_; }
    int power() const { return power_; }
    bool is_zero() const { return num_.is_zero(); }

    /// numerator lifted to the target power of the base
    Poly numerator_at_power(int target) const {
        if (target < power_) throw std::invalid_argument("numerator_at_power: target below current power");
        Poly n = num_;
        for (int i = power_; i < target; ++i) n = n * base_;
        return n;
    }

    void check_base(const RationalSymbol& o) const {
        if (!(base_ == o.base_)) throw std::invalid_argument("RationalSymbol: mixed bases");
    }

    RationalSymbol& operator+=(const RationalSymbol& o) {
        if (o.is_zero()) return *this;
        if (is_zero()) { *this = o; return *this; }
        check_base(o);
        int k = std::max(power_, o.power_);
        Poly n = numerator_at_power(k) + o.numerator_at_power(k);
        *this = RationalSymbol(std::move(n), base_, k);
        return *this;
    }
    friend RationalSymbol operator+(RationalSymbol a, const RationalSymbol& b) { return a += b; }
    RationalSymbol operator-() const { return {num_.scaled(RatC(Rational(-1))), base_, power_}; }
    friend RationalSymbol operator-(RationalSymbol a, const RationalSymbol& b) { return a + (-b); }

    friend RationalSymbol operator*(const RationalSymbol& a, const RationalSymbol& b) {
        if (a.is_zero() || b.is_zero())
            return RationalSymbol(Poly(a.dim()), a.base_, 0);
        a.check_base(b);
        return {a.num_ * b.num_, a.base_, a.power_ + b.power_};
    }
    RationalSymbol times_poly(const Poly& p) const { return {num_ * p, base_, power_}; }
    RationalSymbol scaled(const RatC& c) const {
        Poly n = num_.scaled(c);
        return {std::move(n), base_, power_};
    }

    /// single-axis partial derivative step
    RationalSymbol derive_step(Block b, int axis) const {
        MultiIndex e(dim(), 0);
        e[axis] = 1;
        Poly dn = num_.derive(b, e);
        if (power_ == 0) return {std::move(dn), base_, 0};
        Poly dp = base_.derive(b, e);
        Poly n = dn * base_ - num_.scaled(RatC(Rational(power_))) * dp;
        return {std::move(n), base_, power_ + 1};
    }
    /// repeated derivative; kind=D multiplies by (-i)^{steps}
    RationalSymbol derive(Block b, const MultiIndex& idx, Deriv kind = Deriv::partial) const {
        RationalSymbol r = *this;
        for (int i = 0; i < dim(); ++i)
            for (int k = 0; k < idx[i]; ++k) r = r.derive_step(b, i);
        if (kind == Deriv::D) r = r.scaled(RatC(Rational(1)).times_i_pow(-mi_abs(idx)));
        return r;
    }

    std::complex<double> eval(std::span<const double> xs, std::span<const double> xis) const {
        std::complex<double> n = num_.eval(xs, xis);
        if (power_ == 0) return n;
        std::complex<double> b = base_.eval(xs, xis);
        return n / std::pow(b, power_);
    }

    /// exact equality over the same base (cross-aligned numerators)
    bool equals(const RationalSymbol& o) const {
        if (is_zero() || o.is_zero()) return is_zero() == o.is_zero();
        check_base(o);
        int k = std::max(power_, o.power_);
        return numerator_at_power(k) == o.numerator_at_power(k);
    }
    bool equals_constant(const RatC& c) const {
        return equals(RationalSymbol(Poly::constant(dim(), c), base_, 0));
    }

private:
    Poly num_{1};
    Poly base_{Poly::constant(1, RatC(1))};
    int power_ = 0;
};

} // namespace psdo

#endif
