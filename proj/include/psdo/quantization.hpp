#ifndef PSDO_QUANTIZATION_HPP
#define PSDO_QUANTIZATION_HPP

#include "psdo/polynomial.hpp"
#include "psdo/report.hpp"

#include <optional>
#include <stdexcept>
#include <utility>

namespace psdo {

/// Minimal k in N_0 with |tau| + |1-tau| <= 2^k; k = 0 exactly for tau in [0,1].
inline int tau_level(const Rational& tau) {
    Rational need = (tau < 0 ? -tau : tau);
    Rational one_minus = Rational(1) - tau;
    need += (one_minus < 0 ? -one_minus : one_minus);
    int k = 0;
    Rational pow2(1);
    while (pow2 < need) {
        pow2 *= 2;
        ++k;
    }
    return k;
}

struct TauParams {
    Rational tau;
    int k;
    explicit TauParams(Rational t) : tau(std::move(t)), k(tau_level(tau)) {}
    /// m' = m L^k for the weight constant L of omega(e t) <= L(omega(t)+1).
    double m_prime(double m, double L) const { return m * std::pow(L, k); }
};

enum class Convention { normalized, paper };

/// A polynomial symbol together with its quantization parameter tau and the
/// operator convention. `normalized` means Op_0(x^a xi^b) = x^a D^b with no
/// Fourier prefactor; `paper` keeps the untamed transform, which surfaces as a
/// (2 pi)^d factor in every composition. The factor is tracked symbolically in
/// `twopi_power` so results stay exact.
struct QuantizedSymbol {
    Poly symbol;
    Rational tau;
    Convention convention = Convention::normalized;
    int twopi_power = 0;

    QuantizedSymbol() = default;
    QuantizedSymbol(Poly s, Rational t, Convention c = Convention::normalized, int p2 = 0)
        : symbol(std::move(s)), tau(std::move(t)), convention(c), twopi_power(p2) {
        if (symbol.is_amplitude()) throw std::invalid_argument("QuantizedSymbol: amplitudes not allowed");
    }
};

inline void check_same_convention(const QuantizedSymbol& a, const QuantizedSymbol& b) {
    if (a.convention != b.convention)
        throw std::invalid_argument("mixed symbol conventions; convert before composing");
}

/// tau_1 -> tau_2 change of quantization:
///   a_{tau2} = sum_alpha (1/alpha!) (tau1 - tau2)^{|alpha|} d_xi^alpha D_x^alpha a_{tau1}.
/// Exact and finite on polynomial symbols.
inline QuantizedSymbol change_quantization(const QuantizedSymbol& a, const Rational& to) {
    const int d = a.symbol.dim();
    Rational diff = a.tau - to;
    Poly out(d);
    if (diff == 0 || a.symbol.is_zero()) {
        out = a.symbol;
    } else {
        MultiIndex bound(d);
        MultiIndex bx = a.symbol.max_exponent(Block::x), bxi = a.symbol.max_exponent(Block::xi);
        for (int i = 0; i < d; ++i) bound[i] = std::min(bx[i], bxi[i]);
        for (const MultiIndex& alpha : enumerate_box(bound)) {
            Poly der = a.symbol.derive(Block::x, alpha, Deriv::D).derive(Block::xi, alpha);
            if (der.is_zero()) continue;
            RatC coef(rat_pow(diff, mi_abs(alpha)) / Rational(mi_factorial(alpha)));
            out += der.scaled(coef);
        }
    }
    return {std::move(out), to, a.convention, a.twopi_power};
}

/// tau-symbol of the transpose:
///   t^a = sum_alpha (1/alpha!) (1-2tau)^{|alpha|} d_xi^alpha D_x^alpha [a(x,-xi)].
inline QuantizedSymbol transpose_tau(const QuantizedSymbol& a) {
    const int d = a.symbol.dim();
    Poly flipped = a.symbol.negate_xi();
    Rational factor = Rational(1) - Rational(2) * a.tau;
    Poly out(d);
    if (factor == 0) {
        out = flipped;
    } else {
        MultiIndex bound(d);
        MultiIndex bx = flipped.max_exponent(Block::x), bxi = flipped.max_exponent(Block::xi);
        for (int i = 0; i < d; ++i) bound[i] = std::min(bx[i], bxi[i]);
        for (const MultiIndex& alpha : enumerate_box(bound)) {
            Poly der = flipped.derive(Block::x, alpha, Deriv::D).derive(Block::xi, alpha);
            if (der.is_zero()) continue;
            RatC coef(rat_pow(factor, mi_abs(alpha)) / Rational(mi_factorial(alpha)));
            out += der.scaled(coef);
        }
    }
    return {std::move(out), a.tau, a.convention, a.twopi_power};
}

/// Same-tau composition:
///   c = sum_{beta,gamma} ((-1)^{|beta|} / (beta! gamma!)) tau^{|beta|} (1-tau)^{|gamma|}
///       (d_xi^gamma D_x^beta a)(d_xi^beta D_x^gamma b),
/// times (2 pi)^d in the paper convention.
inline QuantizedSymbol compose_tau(const QuantizedSymbol& a, const QuantizedSymbol& b) {
    if (a.tau != b.tau) throw std::invalid_argument("compose_tau: tau mismatch");
    check_same_convention(a, b);
    const int d = a.symbol.dim();
    Rational tau = a.tau, omt = Rational(1) - tau;

    MultiIndex bbound(d), gbound(d);
    MultiIndex ax = a.symbol.max_exponent(Block::x), axi = a.symbol.max_exponent(Block::xi);
    MultiIndex bx = b.symbol.max_exponent(Block::x), bxi = b.symbol.max_exponent(Block::xi);
    for (int i = 0; i < d; ++i) {
        bbound[i] = std::min(ax[i], bxi[i]);  // beta: D_x on a, d_xi on b
        gbound[i] = std::min(axi[i], bx[i]);  // gamma: d_xi on a, D_x on b
    }
    Poly out(d);
    for (const MultiIndex& beta : enumerate_box(bbound)) {
        if (tau == 0 && mi_abs(beta) > 0) continue;
        Poly da_b = a.symbol.derive(Block::x, beta, Deriv::D);
        if (da_b.is_zero()) continue;
        Poly db_b = b.symbol.derive(Block::xi, beta);
        if (db_b.is_zero()) continue;
        for (const MultiIndex& gamma : enumerate_box(gbound)) {
            if (omt == 0 && mi_abs(gamma) > 0) continue;
            Poly da = da_b.derive(Block::xi, gamma);
            if (da.is_zero()) continue;
            Poly db = db_b.derive(Block::x, gamma, Deriv::D);
            if (db.is_zero()) continue;
            Rational coef = rat_pow(tau, mi_abs(beta)) * rat_pow(omt, mi_abs(gamma)) /
                            Rational(mi_factorial(beta) * mi_factorial(gamma));
            if (mi_abs(beta) % 2) coef = -coef;
            out += (da * db).scaled(RatC(coef));
        }
    }
    int p2 = a.twopi_power + b.twopi_power + (a.convention == Convention::paper ? d : 0);
    return {std::move(out), tau, a.convention, p2};
}

/// Weyl composition (tau = 1/2) in its dedicated form with 2^{-|beta+gamma|}
/// weights; must agree with compose_tau at tau = 1/2 exactly.
inline QuantizedSymbol weyl_compose(const QuantizedSymbol& a, const QuantizedSymbol& b) {
    Rational half(1, 2);
    if (a.tau != half || b.tau != half) throw std::invalid_argument("weyl_compose: symbols must carry tau = 1/2");
    check_same_convention(a, b);
    const int d = a.symbol.dim();

    MultiIndex bbound(d), gbound(d);
    MultiIndex ax = a.symbol.max_exponent(Block::x), axi = a.symbol.max_exponent(Block::xi);
    MultiIndex bx = b.symbol.max_exponent(Block::x), bxi = b.symbol.max_exponent(Block::xi);
    for (int i = 0; i < d; ++i) {
        bbound[i] = std::min(ax[i], bxi[i]);
        gbound[i] = std::min(axi[i], bx[i]);
    }
    Poly out(d);
    for (const MultiIndex& beta : enumerate_box(bbound)) {
        Poly da_b = a.symbol.derive(Block::x, beta, Deriv::D);
        if (da_b.is_zero()) continue;
        Poly db_b = b.symbol.derive(Block::xi, beta);
        if (db_b.is_zero()) continue;
        for (const MultiIndex& gamma : enumerate_box(gbound)) {
            Poly da = da_b.derive(Block::xi, gamma);
            if (da.is_zero()) continue;
            Poly db = db_b.derive(Block::x, gamma, Deriv::D);
            if (db.is_zero()) continue;
            Rational coef = rat_pow(Rational(1, 2), mi_abs(beta) + mi_abs(gamma)) /
                            Rational(mi_factorial(beta) * mi_factorial(gamma));
            if (mi_abs(beta) % 2) coef = -coef;
            out += (da * db).scaled(RatC(coef));
        }
    }
    int p2 = a.twopi_power + b.twopi_power + (a.convention == Convention::paper ? d : 0);
    return {std::move(out), half, a.convention, p2};
}

/// General composition of a tau_1-symbol with a tau_2-symbol into a target
/// tau-symbol, via the closed-form coefficients
///   c = sum (-1)^{|alpha-alpha1+alpha2|} / (gamma! delta!)
///       binom(alpha+beta-alpha1-alpha2, alpha-alpha1) binom(gamma, alpha1) binom(delta, alpha2)
///       tau^{|alpha-alpha1|} (1-tau)^{|beta-alpha2|} tau1^{|alpha1|} (1-tau2)^{|alpha2|}
///       (d_xi^gamma D_x^alpha a)(d_xi^delta D_x^beta b),
/// summed over alpha+beta = gamma+delta, alpha1 <= min(alpha,gamma), alpha2 <= min(beta,delta).
inline QuantizedSymbol compose_general(const QuantizedSymbol& a, const QuantizedSymbol& b,
                                       const Rational& target) {
    check_same_convention(a, b);
    const int d = a.symbol.dim();
    if (b.symbol.dim() != d) throw std::invalid_argument("compose_general: dim mismatch");
    Rational tau = target, tau1 = a.tau, tau2 = b.tau;
    Rational omt = Rational(1) - tau, omt2 = Rational(1) - tau2;

    MultiIndex abound = a.symbol.max_exponent(Block::x);
    MultiIndex gbound = a.symbol.max_exponent(Block::xi);
    MultiIndex bbound = b.symbol.max_exponent(Block::x);
    MultiIndex dbound = b.symbol.max_exponent(Block::xi);

    Poly out(d);
    for (const MultiIndex& alpha : enumerate_box(abound)) {
        for (const MultiIndex& gamma : enumerate_box(gbound)) {
            Poly da = a.symbol.derive(Block::x, alpha, Deriv::D).derive(Block::xi, gamma);
            if (da.is_zero()) continue;
            MultiIndex ab_sum; // alpha + beta = gamma + delta
            for (const MultiIndex& beta : enumerate_box(bbound)) {
                ab_sum = mi_add(alpha, beta);
                if (!mi_leq(gamma, ab_sum)) continue;
                MultiIndex delta = mi_sub(ab_sum, gamma);
                if (!mi_leq(delta, dbound)) continue;
                Poly db = b.symbol.derive(Block::x, beta, Deriv::D).derive(Block::xi, delta);
                if (db.is_zero()) continue;

                // coefficient: inner sum over alpha1 <= min(alpha, gamma), alpha2 <= min(beta, delta)
                Rational coef(0);
                MultiIndex a1max(d), a2max(d);
                for (int i = 0; i < d; ++i) {
                    a1max[i] = std::min(alpha[i], gamma[i]);
                    a2max[i] = std::min(beta[i], delta[i]);
                }
                for (const MultiIndex& a1 : enumerate_box(a1max)) {
                    if (tau1 == 0 && mi_abs(a1) > 0) continue;
                    MultiIndex am1 = mi_sub(alpha, a1);
                    if (tau == 0 && mi_abs(am1) > 0) continue;
                    for (const MultiIndex& a2 : enumerate_box(a2max)) {
                        if (omt2 == 0 && mi_abs(a2) > 0) continue;
                        MultiIndex bm2 = mi_sub(beta, a2);
                        if (omt == 0 && mi_abs(bm2) > 0) continue;
                        MultiIndex top = mi_add(am1, bm2);
                        Rational term = Rational(mi_binomial(top, am1)) * Rational(mi_binomial(gamma, a1)) *
                                        Rational(mi_binomial(delta, a2));
                        term *= rat_pow(tau, mi_abs(am1)) * rat_pow(omt, mi_abs(bm2)) *
                                rat_pow(tau1, mi_abs(a1)) * rat_pow(omt2, mi_abs(a2));
                        if ((mi_abs(am1) + mi_abs(a2)) % 2) term = -term;
                        coef += term;
                    }
                }
                if (coef == 0) continue;
                coef /= Rational(mi_factorial(gamma) * mi_factorial(delta));
                out += (da * db).scaled(RatC(coef));
            }
        }
    }
    int p2 = a.twopi_power + b.twopi_power + (a.convention == Convention::paper ? d : 0);
    return {std::move(out), tau, a.convention, p2};
}

/// Reduce a polynomial amplitude a(x,y,xi) at quantization tau to its graded
/// symbol terms p_j = sum_{|beta+gamma|=j} (1/(beta! gamma!)) tau^{|beta|} (1-tau)^{|gamma|}
/// d_xi^{beta+gamma} (-D_x)^beta D_y^gamma a |_{y=x}. The list is finite and its
/// sum is the exact tau-symbol of the amplitude operator.
inline std::vector<Poly> amplitude_reduce(const Poly& amp, const Rational& tau) {
    if (!amp.is_amplitude()) throw std::invalid_argument("amplitude_reduce: need an amplitude a(x,y,xi)");
    const int d = amp.dim();
    Rational omt = Rational(1) - tau;
    MultiIndex bbound = amp.max_exponent(Block::x);  // beta: D_x
    MultiIndex gbound = amp.max_exponent(Block::y);  // gamma: D_y
    std::vector<Poly> grades(1, Poly(d));
    for (const MultiIndex& beta : enumerate_box(bbound)) {
        if (tau == 0 && mi_abs(beta) > 0) continue;
        Poly da_b = amp.derive(Block::x, beta, Deriv::D);
        if (da_b.is_zero()) continue;
        for (const MultiIndex& gamma : enumerate_box(gbound)) {
            if (omt == 0 && mi_abs(gamma) > 0) continue;
            Poly da = da_b.derive(Block::y, gamma, Deriv::D);
            if (da.is_zero()) continue;
            da = da.derive(Block::xi, mi_add(beta, gamma));
            if (da.is_zero()) continue;
            Rational coef = rat_pow(tau, mi_abs(beta)) * rat_pow(omt, mi_abs(gamma)) /
                            Rational(mi_factorial(beta) * mi_factorial(gamma));
            if (mi_abs(beta) % 2) coef = -coef;
            int j = mi_abs(beta) + mi_abs(gamma);
            if (static_cast<int>(grades.size()) <= j) grades.resize(j + 1, Poly(d));
            grades[j] += da.restrict_y_to_x().scaled(RatC(coef));
        }
    }
    while (grades.size() > 1 && grades.back().is_zero()) grades.pop_back();
    return grades;
}

// ---------------------------------------------------------------------------
// Combinatorial identities behind the composition theorems
// ---------------------------------------------------------------------------

/// Exhaustive exact check of Vandermonde's identity
/// sum_k binom(m,k) binom(n,r-k) = binom(m+n,r) for m,n,r <= max_mnr.
inline Report check_vandermonde(int max_mnr) {
    Report rep;
    rep.title = "vandermonde";
    long long cases = 0;
    for (int m = 0; m <= max_mnr; ++m)
        for (int n = 0; n <= max_mnr; ++n)
            for (int r = 0; r <= max_mnr; ++r) {
                BigInt lhs = 0;
                for (int k = 0; k <= r; ++k) lhs += binomial(m, k) * binomial(n, r - k);
                ++cases;
                if (lhs != binomial(m + n, r)) {
                    rep.pass = false;
                    rep.add("counterexample", "m=" + std::to_string(m) + " n=" + std::to_string(n) +
                                                  " r=" + std::to_string(r));
                    rep.add("cases_checked", cases);
                    return rep;
                }
            }
    rep.add("cases_checked", cases);
    rep.add("violations", 0);
    return rep;
}

/// Multi-index binomial rearrangement used by the same-tau composition:
///   binom(beta+gamma, eps) / (beta! gamma!) =
///   sum_delta 1 / ((beta-delta)! (beta-eps+gamma-delta)! delta! (delta-beta+eps)!),
/// delta ranging over max(0, beta-eps) <= delta <= min(beta, beta-eps+gamma),
/// for all eps <= beta+gamma. Exact rational arithmetic throughout.
inline Report check_composition_rearrangement(int d, int max_total) {
    Report rep;
    rep.title = "composition-rearrangement";
    long long cases = 0;
    for (int tb = 0; tb <= max_total; ++tb)
        for (int tg = 0; tb + tg <= max_total; ++tg)
            for (const MultiIndex& beta : enumerate_exact(d, tb))
                for (const MultiIndex& gamma : enumerate_exact(d, tg)) {
                    MultiIndex bg = mi_add(beta, gamma);
                    for (const MultiIndex& eps : enumerate_box(bg)) {
                        Rational lhs = Rational(mi_binomial(bg, eps)) /
                                       Rational(mi_factorial(beta) * mi_factorial(gamma));
                        Rational rhs(0);
                        MultiIndex lo(d), hi(d);
                        bool empty = false;
                        for (int i = 0; i < d; ++i) {
                            lo[i] = std::max(0, beta[i] - eps[i]);
                            hi[i] = std::min(beta[i], beta[i] - eps[i] + gamma[i]);
                            if (lo[i] > hi[i]) empty = true;
                        }
                        if (!empty) {
                            MultiIndex width = mi_sub(hi, lo);
                            for (const MultiIndex& off : enumerate_box(width)) {
                                MultiIndex delta = mi_add(lo, off);
                                BigInt prod = mi_factorial(mi_sub(beta, delta)) *
                                              mi_factorial(mi_sub(mi_sub(bg, eps), delta)) *
                                              mi_factorial(delta) *
                                              mi_factorial(mi_sub(mi_add(delta, eps), beta));
                                rhs += Rational(1) / Rational(prod);
                            }
                        }
                        ++cases;
                        if (lhs != rhs) {
                            rep.pass = false;
                            rep.add("cases_checked", cases);
                            std::string wit = "beta=";
                            for (int v : beta) wit += std::to_string(v) + ",";
                            wit += " gamma=";
                            for (int v : gamma) wit += std::to_string(v) + ",";
                            wit += " eps=";
                            for (int v : eps) wit += std::to_string(v) + ",";
                            rep.add("counterexample", wit);
                            return rep;
                        }
                    }
                }
    rep.add("cases_checked", cases);
    rep.add("violations", 0);
    return rep;
}

} // namespace psdo

#endif
