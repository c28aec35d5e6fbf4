#ifndef PSDO_SYMBOL_VARIANT_HPP
#define PSDO_SYMBOL_VARIANT_HPP

#include "psdo/expr.hpp"
#include "psdo/polynomial.hpp"
#include "psdo/rational_symbol.hpp"

#include <complex>
#include <span>
#include <variant>

namespace psdo {

/// Any of the three symbol representations, for code that only needs
/// evaluation and pointwise derivative tables (formal sums, class fits).
using GenericSymbol = std::variant<Poly, RationalSymbol, ExprSymbol>;

inline int symbol_dim(const GenericSymbol& s) {
    return std::visit([](const auto& v) { return v.dim(); }, s);
}

inline std::complex<double> symbol_eval(const GenericSymbol& s, std::span<const double> xs,
                                        std::span<const double> xis) {
    return std::visit([&](const auto& v) { return v.eval(xs, xis); }, s);
}

/// All partials d^mu_x d^nu_xi of a symbol at one point, |mu + nu| <= order,
/// indexed by the JetSpace ordering of the stacked index (mu, nu).
class PartialTable {
public:
    PartialTable(int dim, int order, std::vector<std::complex<double>> values)
        : dim_(dim), order_(order), values_(std::move(values)) {}

    std::complex<double> partial(const MultiIndex& mu, const MultiIndex& nu) const {
        MultiIndex full(mu);
        full.insert(full.end(), nu.begin(), nu.end());
        return values_[JetSpace::get(2 * dim_, order_).pos.at(full)];
    }
    std::complex<double> value() const { return values_[0]; }
    int dim() const { return dim_; }
    int order() const { return order_; }
    const std::vector<std::complex<double>>& raw() const { return values_; }

private:
    int dim_, order_;
    std::vector<std::complex<double>> values_;
};

/// Derivative source for repeated pointwise fits: Poly and RationalSymbol get
/// their derivatives taken symbolically once and evaluated per point; an
/// ExprSymbol propagates one jet per point.
class DerivativeBank {
public:
    DerivativeBank(GenericSymbol s, int order) : sym_(std::move(s)), dim_(symbol_dim(sym_)), order_(order) {
        if (std::get_if<ExprSymbol>(&sym_)) return;
        const JetSpace& space = JetSpace::get(2 * dim_, order_);
        derived_.reserve(space.idx.size());
        for (const MultiIndex& full : space.idx) {
            MultiIndex mu(full.begin(), full.begin() + dim_);
            MultiIndex nu(full.begin() + dim_, full.end());
            if (const auto* p = std::get_if<Poly>(&sym_))
                derived_.emplace_back(p->derive(Block::x, mu).derive(Block::xi, nu));
            else
                derived_.emplace_back(std::get<RationalSymbol>(sym_).derive(Block::x, mu).derive(Block::xi, nu));
        }
    }

    int dim() const { return dim_; }
    int order() const { return order_; }

    PartialTable at(std::span<const double> xs, std::span<const double> xis) const {
        const JetSpace& space = JetSpace::get(2 * dim_, order_);
        std::vector<std::complex<double>> vals(space.idx.size());
        if (const auto* e = std::get_if<ExprSymbol>(&sym_)) {
            Jet j = e->jet(xs, xis, order_);
            for (size_t i = 0; i < space.idx.size(); ++i) vals[i] = j.partial(space.idx[i]);
        } else {
            for (size_t i = 0; i < space.idx.size(); ++i) vals[i] = symbol_eval(derived_[i], xs, xis);
        }
        return {dim_, order_, std::move(vals)};
    }

private:
    GenericSymbol sym_;
    int dim_, order_;
    std::vector<GenericSymbol> derived_;
};

} // namespace psdo

#endif
