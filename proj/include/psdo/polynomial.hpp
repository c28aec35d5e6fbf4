#ifndef PSDO_POLYNOMIAL_HPP
#define PSDO_POLYNOMIAL_HPP

#include "psdo/multiindex.hpp"
#include "psdo/rational.hpp"

#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace psdo {

enum class Block { x, y, xi };
enum class Deriv { partial, D }; // D = (-i)^{|idx|} * partial

struct Mono {
    MultiIndex x, y, xi; // y empty for plain symbols
    auto operator<=>(const Mono&) const = default;
};

/// Sparse multivariate polynomial in (x, xi) or, for amplitudes, (x, y, xi),
/// with exact complex-rational coefficients. Zero coefficients are never stored.
class Poly {
public:
    Poly() : Poly(1, false) {}
    explicit Poly(int dim, bool amplitude = false) : dim_(dim), amp_(amplitude) {
        if (dim < 1) throw std::invalid_argument("Poly: dim must be >= 1");
    }

    static Poly constant(int dim, RatC c, bool amplitude = false) {
        Poly p(dim, amplitude);
        p.add_term(MultiIndex(dim, 0), amplitude ? MultiIndex(dim, 0) : MultiIndex{}, MultiIndex(dim, 0), c);
        return p;
    }
    static Poly variable(int dim, Block b, int axis, bool amplitude = false) {
        if (axis < 0 || axis >= dim) throw std::invalid_argument("Poly::variable: axis out of range");
        if (b == Block::y && !amplitude) throw std::invalid_argument("Poly::variable: y block needs amplitude");
        Poly p(dim, amplitude);
        MultiIndex ex(dim, 0), ey(amplitude ? dim : 0, 0), exi(dim, 0);
        (b == Block::x ? ex : b == Block::y ? ey : exi)[axis] = 1;
        p.add_term(ex, ey, exi, RatC(1));
        return p;
    }

    int dim() const { return dim_; }
    bool is_amplitude() const { return amp_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<Mono, RatC>& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }

    bool is_constant() const {
        if (terms_.empty()) return true;
        if (terms_.size() > 1) return false;
        const Mono& m = terms_.begin()->first;
        return mi_abs(m.x) + mi_abs(m.y) + mi_abs(m.xi) == 0;
    }
    RatC constant_value() const {
        if (terms_.empty()) return RatC(0);
        return terms_.begin()->second;
    }

    void add_term(MultiIndex ex, MultiIndex ey, MultiIndex exi, const RatC& c) {
        check_lengths(ex, ey, exi);
        if (c.is_zero()) return;
        Mono m{std::move(ex), std::move(ey), std::move(exi)};
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(std::move(m), c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    void add_term(MultiIndex ex, MultiIndex exi, const RatC& c) {
        add_term(std::move(ex), amp_ ? MultiIndex(dim_, 0) : MultiIndex{}, std::move(exi), c);
    }

    Poly& operator+=(const Poly& o) {
        check_compat(o);
        for (const auto& [m, c] : o.terms_) {
            auto it = terms_.find(m);
            if (it == terms_.end()) {
                terms_.emplace(m, c);
            } else {
                it->second += c;
                if (it->second.is_zero()) terms_.erase(it);
            }
        }
        return *this;
    }
    Poly& operator-=(const Poly& o) { return *this += -o; }
    Poly operator-() const {
        Poly r = *this;
        for (auto& [m, c] : r.terms_) c = -c;
        return r;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        a.check_compat(b);
        Poly r(a.dim_, a.amp_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                r.add_term(mi_add(ma.x, mb.x),
                           a.amp_ ? mi_add(ma.y, mb.y) : MultiIndex{},
                           mi_add(ma.xi, mb.xi), ca * cb);
        return r;
    }

    Poly scaled(const RatC& c) const {
        Poly r(dim_, amp_);
        if (c.is_zero()) return r;
        for (const auto& [m, v] : terms_) r.terms_.emplace(m, v * c);
        return r;
    }

    friend bool operator==(const Poly& a, const Poly& b) {
        return a.dim_ == b.dim_ && a.amp_ == b.amp_ && a.terms_ == b.terms_;
    }

    /// Repeated partial (or D = -i d/d.) derivative in one block.
    Poly derive(Block b, const MultiIndex& idx, Deriv kind = Deriv::partial) const {
        if (static_cast<int>(idx.size()) != dim_) throw std::invalid_argument("Poly::derive: index dim mismatch");
        if (b == Block::y && !amp_) throw std::invalid_argument("Poly::derive: no y block");
        Poly r(dim_, amp_);
        for (const auto& [m, c] : terms_) {
            const MultiIndex& e = (b == Block::x ? m.x : b == Block::y ? m.y : m.xi);
            if (!mi_leq(idx, e)) continue;
            BigInt fall = 1; // falling factorial e!/(e-idx)!
            for (int i = 0; i < dim_; ++i)
                for (int k = 0; k < idx[i]; ++k) fall *= (e[i] - k);
            RatC nc = c * Rational(fall);
            Mono nm = m;
            (b == Block::x ? nm.x : b == Block::y ? nm.y : nm.xi) = mi_sub(e, idx);
            if (kind == Deriv::D) nc = nc.times_i_pow(-mi_abs(idx));
            r.add_term(std::move(nm.x), std::move(nm.y), std::move(nm.xi), nc);
        }
        return r;
    }

    /// a(x, -xi)
    Poly negate_xi() const {
        Poly r(dim_, amp_);
        for (const auto& [m, c] : terms_)
            r.add_term(m.x, m.y, m.xi, mi_abs(m.xi) % 2 ? -c : c);
        return r;
    }

    /// Amplitude restriction a(x, y, xi)|_{y=x} as a plain symbol.
    Poly restrict_y_to_x() const {
        if (!amp_) return *this;
        Poly r(dim_, false);
        for (const auto& [m, c] : terms_) r.add_term(mi_add(m.x, m.y), {}, m.xi, c);
        return r;
    }

    std::complex<double> eval(std::span<const double> xs, std::span<const double> xis) const {
        return eval(xs, {}, xis);
    }
    std::complex<double> eval(std::span<const double> xs, std::span<const double> ys,
                              std::span<const double> xis) const {
        if (static_cast<int>(xs.size()) != dim_ || static_cast<int>(xis.size()) != dim_ ||
            (amp_ && static_cast<int>(ys.size()) != dim_))
            throw std::invalid_argument("Poly::eval: point dim mismatch");
        std::complex<double> s = 0;
        for (const auto& [m, c] : terms_) {
            double mono = 1;
            for (int i = 0; i < dim_; ++i) {
                mono *= ipow(xs[i], m.x[i]);
                if (amp_) mono *= ipow(ys[i], m.y[i]);
                mono *= ipow(xis[i], m.xi[i]);
            }
            s += to_complex(c) * mono;
        }
        return s;
    }

    /// Componentwise max exponent over all terms in a block.
    MultiIndex max_exponent(Block b) const {
        MultiIndex r(dim_, 0);
        for (const auto& [m, c] : terms_) {
            const MultiIndex& e = (b == Block::x ? m.x : b == Block::y ? m.y : m.xi);
            for (int i = 0; i < dim_; ++i) r[i] = std::max(r[i], e[i]);
        }
        return r;
    }
    int degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_) d = std::max(d, mi_abs(m.x) + mi_abs(m.y) + mi_abs(m.xi));
        return d;
    }

    /// True if every coefficient is real, the constant term is positive, and every
    /// non-constant term has all-even exponents with nonnegative coefficient.
    /// Such a polynomial is bounded below by its constant term.
    bool structurally_positive() const {
        bool has_const = false;
        for (const auto& [m, c] : terms_) {
            if (c.im != 0) return false;
            if (mi_abs(m.x) + mi_abs(m.y) + mi_abs(m.xi) == 0) {
                if (c.re <= 0) return false;
                has_const = true;
                continue;
            }
            auto even = [](const MultiIndex& e) {
                for (int v : e)
                    if (v % 2) return false;
                return true;
            };
            if (!even(m.x) || !even(m.y) || !even(m.xi) || c.re < 0) return false;
        }
        return has_const;
    }

private:
    static double ipow(double v, int e) {
        double r = 1;
        for (int i = 0; i < e; ++i) r *= v;
        return r;
    }
    void check_lengths(const MultiIndex& ex, const MultiIndex& ey, const MultiIndex& exi) const {
        if (static_cast<int>(ex.size()) != dim_ || static_cast<int>(exi.size()) != dim_ ||
            static_cast<int>(ey.size()) != (amp_ ? dim_ : 0))
            throw std::invalid_argument("Poly: exponent length mismatch");
    }
    void check_compat(const Poly& o) const {
        if (dim_ != o.dim_ || amp_ != o.amp_)
            throw std::invalid_argument("Poly: dimension/kind mismatch");
    }

    int dim_;
    bool amp_;
    std::map<Mono, RatC> terms_;
};

} // namespace psdo

#endif
