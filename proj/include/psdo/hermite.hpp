#ifndef PSDO_HERMITE_HPP
#define PSDO_HERMITE_HPP

#include "psdo/quantization.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <vector>

namespace psdo {

/// Finite expansion over tensor products of normalized Hermite functions h_k.
/// The basis is real and orthonormal, closed under multiplication by x_i and
/// differentiation through the ladder relations
///   x h_k  = sqrt(k/2) h_{k-1} + sqrt((k+1)/2) h_{k+1},
///   h_k'   = sqrt(k/2) h_{k-1} - sqrt((k+1)/2) h_{k+1}.
struct HermiteExpansion {
    int dim = 1;
    std::map<std::vector<int>, std::complex<double>> coeff;

    HermiteExpansion() = default;
    explicit HermiteExpansion(int d) : dim(d) {}

    static HermiteExpansion mode(int d, std::vector<int> k) {
        HermiteExpansion u(d);
        u.coeff[std::move(k)] = 1.0;
        return u;
    }
    static HermiteExpansion mode1d(int k) { return mode(1, {k}); }

    void add(const std::vector<int>& k, std::complex<double> c) {
        auto it = coeff.find(k);
        if (it == coeff.end())
            coeff.emplace(k, c);
        else {
            it->second += c;
            if (std::abs(it->second) == 0.0) coeff.erase(it);
        }
    }
    HermiteExpansion& operator+=(const HermiteExpansion& o) {
        for (const auto& [k, c] : o.coeff) add(k, c);
        return *this;
    }
    HermiteExpansion& operator-=(const HermiteExpansion& o) {
        for (const auto& [k, c] : o.coeff) add(k, -c);
        return *this;
    }
    friend HermiteExpansion operator+(HermiteExpansion a, const HermiteExpansion& b) { return a += b; }
    friend HermiteExpansion operator-(HermiteExpansion a, const HermiteExpansion& b) { return a -= b; }
    HermiteExpansion scaled(std::complex<double> s) const {
        HermiteExpansion r(dim);
        for (const auto& [k, c] : coeff) r.coeff[k] = c * s;
        return r;
    }

    double norm() const {
        double s = 0;
        for (const auto& [k, c] : coeff) s += std::norm(c);
        return std::sqrt(s);
    }
    int max_mode() const {
        int m = 0;
        for (const auto& [k, c] : coeff)
            for (int v : k) m = std::max(m, v);
        return m;
    }

    /// multiply by x_i
    HermiteExpansion apply_x(int axis) const {
        HermiteExpansion r(dim);
        for (const auto& [k, c] : coeff) {
            std::vector<int> kk = k;
            if (k[axis] > 0) {
                kk[axis] = k[axis] - 1;
                r.add(kk, c * std::sqrt(k[axis] / 2.0));
            }
            kk[axis] = k[axis] + 1;
            r.add(kk, c * std::sqrt((k[axis] + 1) / 2.0));
        }
        return r;
    }
    /// apply D_i = -i d/dx_i
    HermiteExpansion apply_D(int axis) const {
        const std::complex<double> mi(0, -1);
        HermiteExpansion r(dim);
        for (const auto& [k, c] : coeff) {
            std::vector<int> kk = k;
            if (k[axis] > 0) {
                kk[axis] = k[axis] - 1;
                r.add(kk, mi * c * std::sqrt(k[axis] / 2.0));
            }
            kk[axis] = k[axis] + 1;
            r.add(kk, -mi * c * std::sqrt((k[axis] + 1) / 2.0));
        }
        return r;
    }

};

/// Value of the normalized Hermite function h_k at x (d = 1).
inline double hermite_function(int k, double x) {
    double h0 = std::pow(M_PI, -0.25) * std::exp(-x * x / 2);
    if (k == 0) return h0;
    double h1 = std::sqrt(2.0) * x * h0;
    for (int j = 1; j < k; ++j) {
        double h2 = std::sqrt(2.0 / (j + 1)) * x * h1 - std::sqrt(static_cast<double>(j) / (j + 1)) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

inline std::complex<double> eval_expansion(const HermiteExpansion& u, double x) {
    if (u.dim != 1) throw std::invalid_argument("eval_expansion: d = 1 only");
    std::complex<double> s = 0;
    for (const auto& [k, c] : u.coeff) s += c * hermite_function(k[0], x);
    return s;
}

/// Bilinear pairing <u, v> = integral of u v (no conjugation). The basis is
/// real orthonormal, so this is the plain coefficient dot product.
inline std::complex<double> pairing(const HermiteExpansion& u, const HermiteExpansion& v) {
    const auto *small = &u.coeff, *big = &v.coeff;
    const HermiteExpansion* other = &v;
    if (small->size() > big->size()) {
        small = &v.coeff;
        other = &u;
    }
    std::complex<double> s = 0;
    for (const auto& [k, c] : *small) {
        auto it = other->coeff.find(k);
        if (it != other->coeff.end()) s += c * it->second;
    }
    return s;
}

/// Normal-ordered differential operator sum c x^alpha D^beta: every coordinate
/// multiplication stands left of every derivative. This is Op_0 of its
/// coefficient symbol in the normalized convention.
struct DiffOperator {
    int dim = 1;
    std::map<std::pair<MultiIndex, MultiIndex>, RatC> terms; // (alpha, beta) -> c

    DiffOperator() = default;
    explicit DiffOperator(int d) : dim(d) {}

    static DiffOperator from_left_symbol(const Poly& a) {
        DiffOperator T(a.dim());
        for (const auto& [m, c] : a.terms()) T.add(m.x, m.xi, c);
        return T;
    }
    Poly left_symbol() const {
        Poly a(dim);
        for (const auto& [k, c] : terms) a.add_term(k.first, k.second, c);
        return a;
    }

    void add(const MultiIndex& alpha, const MultiIndex& beta, const RatC& c) {
        if (c.is_zero()) return;
        auto key = std::make_pair(alpha, beta);
        auto it = terms.find(key);
        if (it == terms.end())
            terms.emplace(std::move(key), c);
        else {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    int degree() const {
        int d = 0;
        for (const auto& [k, c] : terms) d = std::max(d, mi_abs(k.first) + mi_abs(k.second));
        return d;
    }

    /// Exact composition with re-normal-ordering:
    /// (x^a D^b)(x^g D^e) = sum_{mu <= min(b,g)} binom(b,mu) (-i)^{|mu|} g!/(g-mu)! x^{a+g-mu} D^{b-mu+e}.
    DiffOperator compose(const DiffOperator& o) const {
        if (dim != o.dim) throw std::invalid_argument("DiffOperator::compose: dim mismatch");
        DiffOperator r(dim);
        for (const auto& [ka, ca] : terms)
            for (const auto& [kb, cb] : o.terms) {
                const MultiIndex &alpha = ka.first, &beta = ka.second;
                const MultiIndex &gamma = kb.first, &eps = kb.second;
                MultiIndex mmax(dim);
                for (int i = 0; i < dim; ++i) mmax[i] = std::min(beta[i], gamma[i]);
                for (const MultiIndex& mu : enumerate_box(mmax)) {
                    BigInt fall = 1;
                    for (int i = 0; i < dim; ++i)
                        for (int k = 0; k < mu[i]; ++k) fall *= (gamma[i] - k);
                    RatC c = ca * cb * Rational(mi_binomial(beta, mu) * fall);
                    c = c.times_i_pow(-mi_abs(mu));
                    r.add(mi_add(alpha, mi_sub(gamma, mu)), mi_add(mi_sub(beta, mu), eps), c);
                }
            }
        return r;
    }

    HermiteExpansion apply(const HermiteExpansion& u) const {
        if (u.dim != dim) throw std::invalid_argument("DiffOperator::apply: dim mismatch");
        HermiteExpansion out(dim);
        for (const auto& [k, c] : terms) {
            HermiteExpansion v = u;
            for (int i = 0; i < dim; ++i)
                for (int rounds = 0; rounds < k.second[i]; ++rounds) v = v.apply_D(i);
            for (int i = 0; i < dim; ++i)
                for (int rounds = 0; rounds < k.first[i]; ++rounds) v = v.apply_x(i);
            out += v.scaled(to_complex(c));
        }
        return out;
    }
};

/// Left-quantize after reduction to tau = 0:
/// Op_tau(a) = Op_0(change_quantization(a, tau -> 0)), x^alpha xi^beta -> x^alpha D^beta.
inline DiffOperator quantize_to_operator(const Poly& a, const Rational& tau) {
    QuantizedSymbol q(a, tau);
    return DiffOperator::from_left_symbol(change_quantization(q, Rational(0)).symbol);
}
inline DiffOperator quantize_to_operator(const QuantizedSymbol& a) {
    if (a.twopi_power != 0)
        throw std::invalid_argument("quantize_to_operator: normalized-convention symbols only");
    return quantize_to_operator(a.symbol, a.tau);
}

inline DiffOperator& operator+=(DiffOperator& a, const DiffOperator& b) {
    for (const auto& [k, c] : b.terms) a.add(k.first, k.second, c);
    return a;
}

/// Exact operator of a polynomial amplitude: the term x^alpha y^beta xi^gamma
/// acts as u -> x^alpha D^gamma (x^beta u).
inline DiffOperator amplitude_operator(const Poly& amp) {
    if (!amp.is_amplitude()) throw std::invalid_argument("amplitude_operator: need an amplitude");
    const int d = amp.dim();
    DiffOperator T(d);
    MultiIndex zero(d, 0);
    for (const auto& [m, c] : amp.terms()) {
        DiffOperator piece(d);
        piece.add(m.x, m.xi, c);            // x^alpha D^gamma ...
        DiffOperator inner(d);
        inner.add(m.y, zero, RatC(1));      // ... applied after multiplication by x^beta
        T += piece.compose(inner);
    }
    return T;
}

// ---------------------------------------------------------------------------
// Oracle test sets and comparisons
// ---------------------------------------------------------------------------

/// Basis modes k <= kmax (d = 1) or all tensor modes with entries <= kmax.
inline std::vector<HermiteExpansion> basis_test_set(int dim, int kmax) {
    std::vector<HermiteExpansion> set;
    MultiIndex bound(dim, kmax);
    for (const MultiIndex& k : enumerate_box(bound)) set.push_back(HermiteExpansion::mode(dim, k));
    return set;
}

inline HermiteExpansion random_expansion(std::mt19937_64& rng, int dim, int kmax, int n_terms) {
    std::uniform_int_distribution<int> mode(0, kmax);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    HermiteExpansion u(dim);
    for (int t = 0; t < n_terms; ++t) {
        std::vector<int> k(dim);
        for (int& v : k) v = mode(rng);
        u.add(k, {amp(rng), amp(rng)});
    }
    return u;
}

struct OracleError {
    double max_rel = 0;
    std::string worst;
};

inline void track(OracleError& e, double err, double scale, const std::string& what) {
    double rel = err / std::max(1.0, scale);
    if (rel > e.max_rel) {
        e.max_rel = rel;
        e.worst = what;
    }
}

/// || Op_{tau1}(a) u - Op_{tau2}(changed a) u || over the test set.
inline OracleError oracle_quantization_error(const Poly& a, const Rational& tau1, const Rational& tau2,
                                             const std::vector<HermiteExpansion>& test_set) {
    DiffOperator T1 = quantize_to_operator(a, tau1);
    QuantizedSymbol q(a, tau1);
    DiffOperator T2 = quantize_to_operator(change_quantization(q, tau2).symbol, tau2);
    OracleError e;
    int idx = 0;
    for (const auto& u : test_set) {
        HermiteExpansion r1 = T1.apply(u), r2 = T2.apply(u);
        track(e, (r1 - r2).norm(), r1.norm(), "test input #" + std::to_string(idx++));
    }
    return e;
}

/// || Op(c) u - Op(a)(Op(b) u) || for a composed symbol c.
inline OracleError oracle_composition_error(const QuantizedSymbol& a, const QuantizedSymbol& b,
                                            const QuantizedSymbol& c,
                                            const std::vector<HermiteExpansion>& test_set) {
    DiffOperator Ta = quantize_to_operator(a), Tb = quantize_to_operator(b), Tc = quantize_to_operator(c);
    OracleError e;
    int idx = 0;
    for (const auto& u : test_set) {
        HermiteExpansion lhs = Tc.apply(u);
        HermiteExpansion rhs = Ta.apply(Tb.apply(u));
        track(e, (lhs - rhs).norm(), rhs.norm(), "test input #" + std::to_string(idx++));
    }
    return e;
}

/// |<A u, v> - <u, tA v>| over pairs from the test set.
inline OracleError oracle_transpose_error(const QuantizedSymbol& a,
                                          const std::vector<HermiteExpansion>& test_set) {
    DiffOperator T = quantize_to_operator(a);
    DiffOperator Tt = quantize_to_operator(transpose_tau(a));
    OracleError e;
    for (size_t i = 0; i < test_set.size(); ++i)
        for (size_t j = 0; j < test_set.size(); j += 3) {
            const auto &u = test_set[i], &v = test_set[j];
            std::complex<double> lhs = pairing(T.apply(u), v);
            std::complex<double> rhs = pairing(u, Tt.apply(v));
            track(e, std::abs(lhs - rhs), std::abs(lhs),
                  "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    return e;
}

/// Amplitude operator vs Op_tau of the reduced symbol.
inline OracleError oracle_amplitude_error(const Poly& amp, const Rational& tau,
                                          const std::vector<HermiteExpansion>& test_set) {
    DiffOperator direct = amplitude_operator(amp);
    Poly total(amp.dim());
    for (const Poly& pj : amplitude_reduce(amp, tau)) total += pj;
    DiffOperator reduced = quantize_to_operator(total, tau);
    OracleError e;
    int idx = 0;
    for (const auto& u : test_set) {
        HermiteExpansion r1 = direct.apply(u), r2 = reduced.apply(u);
        track(e, (r1 - r2).norm(), r1.norm(), "test input #" + std::to_string(idx++));
    }
    return e;
}

} // namespace psdo

#endif
