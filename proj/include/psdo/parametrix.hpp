#ifndef PSDO_PARAMETRIX_HPP
#define PSDO_PARAMETRIX_HPP

#include "psdo/class_fit.hpp"
#include "psdo/quantization.hpp"
#include "psdo/rational_symbol.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace psdo {

// ---------------------------------------------------------------------------
// Hypoellipticity checking
// ---------------------------------------------------------------------------

struct HypoParams {
    double m = 0;
    double m0 = 0;        // m0 <= m
    double rho = 1;
    double R = 2;
    WeightFunction sigma = WeightFunction::gevrey(0.75); // Gevrey, omega(t^{1/rho}) = o(sigma(t))
    int maxorder = 4;
    std::vector<int> ns = {1, 2, 4};
};

struct HypoCheck {
    bool passes = false;
    bool lower_ok = false, upper_ok = false, derivatives_ok = false, sigma_ok = false;
    double C1 = 0, C2 = 0, Cii = 0;
    int n_used = 0;
    std::vector<double> witness; // point where the lower bound is worst
    Report report;
};

namespace detail {
/// Minimize f over the sphere |pt| = norm in R^{nd} by seeded sampling plus
/// annealing refinement; returns the best direction found.
inline std::pair<double, std::vector<double>> min_on_sphere(
    const std::function<double(std::span<const double>)>& f, int nd, double norm,
    unsigned long long seed, int samples = 400, int anneal = 120) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    auto normalize = [&](std::vector<double>& v) {
        double n2 = 0;
        for (double c : v) n2 += c * c;
        double s = norm / std::sqrt(n2);
        for (double& c : v) c *= s;
    };
    std::vector<double> best(nd, 0.0);
    best[0] = norm;
    double bestval = f(best);
    for (int i = 0; i < samples; ++i) {
        std::vector<double> v(nd);
        for (double& c : v) c = gauss(rng);
        normalize(v);
        double val = f(v);
        if (val < bestval) {
            bestval = val;
            best = v;
        }
    }
    double step = 0.7;
    for (int i = 0; i < anneal; ++i) {
        std::vector<double> v(nd);
        for (int k = 0; k < nd; ++k) v[k] = best[k] + step * norm * gauss(rng) / std::sqrt(static_cast<double>(nd));
        normalize(v);
        double val = f(v);
        if (val < bestval) {
            bestval = val;
            best = v;
        } else {
            step *= 0.93;
        }
    }
    return {bestval, best};
}
} // namespace detail

/// Fits the two-sided bounds C1 e^{m0 omega} <= |a| <= C2 e^{m omega} and the
/// derivative condition |d^mu d^nu a| <= C^{|mu+nu|} <.>^{-rho|mu+nu|}
/// e^{phi*_sigma(n|mu|)/n} e^{phi*_sigma(n|nu|)/n} |a| on the sampled annuli.
/// The lower fit hunts for near-zeros along every annulus; a collapsing
/// per-annulus minimum is a failed condition (i) and the minimizing point is
/// returned as the witness.
inline HypoCheck check_hypoelliptic(const GenericSymbol& a, const WeightFunction& omega,
                                    const HypoParams& hp, const AnnuliSpec& region) {
    const int dim = symbol_dim(a);
    HypoCheck out;
    out.report.title = "hypoelliptic-check";
    YoungConjugate conj_sigma(hp.sigma);

    // sigma admissibility: omega(t^{1/rho}) = o(sigma(t)) on a geometric sample
    {
        double prev = std::numeric_limits<double>::infinity();
        int decreasing_from = -1;
        bool monotone_tail = true;
        for (int k = 4; k <= 28; ++k) {
            double t = std::pow(2.0, k);
            double ratio = omega(std::pow(t, 1.0 / hp.rho)) / hp.sigma(t);
            if (ratio < prev - 1e-15) {
                if (decreasing_from < 0) decreasing_from = k;
            } else if (decreasing_from >= 0) {
                monotone_tail = false;
            }
            prev = ratio;
        }
        out.sigma_ok = decreasing_from >= 0 && monotone_tail && prev < 1.0;
        out.report.add("sigma.ratio_tail", prev);
        out.report.add("sigma.admissible", out.sigma_ok);
    }

    // lower/upper bound fits per annulus, with witness search for the minimum
    std::vector<double> radii;
    for (int k = 0; k < region.n_radii; ++k)
        radii.push_back(region.rmin *
                        std::pow(region.rmax / region.rmin,
                                 region.n_radii == 1 ? 0.0 : static_cast<double>(k) / (region.n_radii - 1)));
    double c1_first = 0, c1_last = 0;
    out.C1 = std::numeric_limits<double>::infinity();
    out.C2 = 0;
    for (size_t k = 0; k < radii.size(); ++k) {
        double bracket = radii[k];
        double norm = std::sqrt(std::max(0.0, bracket * bracket - 1.0));
        auto lower_ratio = [&](std::span<const double> pt) {
            std::span<const double> xs(pt.data(), dim), xis(pt.data() + dim, dim);
            return std::abs(symbol_eval(a, xs, xis)) * std::exp(-hp.m0 * omega(norm));
        };
        auto [minval, argmin] = detail::min_on_sphere(lower_ratio, 2 * dim, norm, region.seed + k);
        if (minval < out.C1) {
            out.C1 = minval;
            out.witness = argmin;
        }
        if (k == 0) c1_first = minval;
        if (k + 1 == radii.size()) c1_last = minval;

        AnnuliSpec one;
        one.rmin = one.rmax = bracket;
        one.n_radii = 1;
        one.n_dirs = region.n_dirs;
        one.seed = region.seed + 1000 + k;
        for (const auto& pt : sample_annuli(dim, one)) {
            double om = omega(norm);
            double v = std::abs(symbol_eval(a, pt.xs, pt.xis));
            out.C2 = std::max(out.C2, v * std::exp(-hp.m * om));
        }
    }
    out.lower_ok = out.C1 > 1e-8 && c1_last > 1e-3 * std::max(c1_first, 1e-300);
    out.upper_ok = std::isfinite(out.C2);
    out.report.add("C1_fit", out.C1);
    out.report.add("C1_first_annulus", c1_first);
    out.report.add("C1_last_annulus", c1_last);
    out.report.add("C2_fit", out.C2);
    if (!out.witness.empty()) {
        std::string w = "(";
        for (size_t i = 0; i < out.witness.size(); ++i)
            w += (i ? "," : "") + std::to_string(out.witness[i]);
        out.report.add("witness", w + ")");
    }

    // condition (ii): fitted per-derivative constant, reported as the smallest
    // C over the n grid; divergence across the order range fails the fit.
    DerivativeBank bank(a, hp.maxorder);
    const JetSpace& space = JetSpace::get(2 * dim, hp.maxorder);
    double bestC = std::numeric_limits<double>::infinity();
    int bestn = hp.ns.empty() ? 1 : hp.ns.front();
    double low_max = 0, high_max = 0;
    for (int n : hp.ns) {
        double C = 0;
        double lo = 0, hi = 0;
        for (const auto& pt : sample_annuli(dim, region)) {
            PartialTable table = bank.at(pt.xs, pt.xis);
            double base = std::abs(table.value());
            if (base < 1e-280) continue; // the lower-bound fit already catches this
            for (size_t i = 1; i < space.idx.size(); ++i) {
                const MultiIndex& full = space.idx[i];
                int total = mi_abs(full);
                if (total == 0) continue;
                MultiIndex mu(full.begin(), full.begin() + dim);
                MultiIndex nu(full.begin() + dim, full.end());
                double gain = std::exp(conj_sigma(static_cast<double>(n) * mi_abs(mu)) / n) *
                              std::exp(conj_sigma(static_cast<double>(n) * mi_abs(nu)) / n);
                double ratio = std::abs(table.raw()[i]) * std::pow(pt.bracket, hp.rho * total) / (gain * base);
                double Cterm = std::pow(ratio, 1.0 / total);
                C = std::max(C, Cterm);
                (total <= hp.maxorder / 2 ? lo : hi) = std::max(total <= hp.maxorder / 2 ? lo : hi, Cterm);
            }
        }
        if (C < bestC) {
            bestC = C;
            bestn = n;
            low_max = lo;
            high_max = hi;
        }
    }
    out.Cii = bestC;
    out.n_used = bestn;
    out.derivatives_ok = std::isfinite(bestC) && (high_max <= 10 * std::max(low_max, 1.0));
    out.report.add("Cii_fit", out.Cii);
    out.report.add("Cii_n", out.n_used);
    out.report.add("derivatives_ok", out.derivatives_ok);

    out.passes = out.lower_ok && out.upper_ok && out.derivatives_ok && out.sigma_ok;
    out.report.add("lower_ok", out.lower_ok);
    out.report.pass = true; // reporting operation
    return out;
}

/// Theorem-side condition (i): |p| >= (1/R) e^{-|m| omega} for <(x,xi)> >= R.
/// Returns the smallest admissible R-constant over the samples.
inline double fit_parametrix_lower_constant(const GenericSymbol& a, const WeightFunction& omega,
                                            double m, const AnnuliSpec& region) {
    const int dim = symbol_dim(a);
    double worst = 0;
    for (const auto& pt : sample_annuli(dim, region)) {
        std::vector<double> xy(pt.xs);
        xy.insert(xy.end(), pt.xis.begin(), pt.xis.end());
        double v = std::abs(symbol_eval(a, pt.xs, pt.xis));
        if (v == 0) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::exp(-std::abs(m) * omega.at_point(xy)) / v);
    }
    return worst;
}

/// Re-fit after a change of quantization: computes a_{tau2} explicitly and
/// reruns the lower-bound fit on both symbols (Def. HGS is quantization-stable
/// for m0 = m, so the fitted constants should agree up to sampling noise).
struct InvarianceCheck {
    HypoCheck before, after;
    Poly changed;
    Report report;
};

inline InvarianceCheck hypo_invariance_check(const Poly& a, const Rational& tau1, const Rational& tau2,
                                             const WeightFunction& omega, const HypoParams& hp,
                                             const AnnuliSpec& region) {
    InvarianceCheck out;
    QuantizedSymbol q(a, tau1);
    out.changed = change_quantization(q, tau2).symbol;
    out.before = check_hypoelliptic(a, omega, hp, region);
    out.after = check_hypoelliptic(out.changed, omega, hp, region);
    out.report.title = "hypo-invariance";
    out.report.add("tau1.passes", out.before.passes);
    out.report.add("tau2.passes", out.after.passes);
    out.report.add("tau1.C1", out.before.C1);
    out.report.add("tau2.C1", out.after.C1);
    out.report.add("symbol_changed", !(out.changed == a));
    out.report.pass = true;
    return out;
}

// ---------------------------------------------------------------------------
// Parametrix construction
// ---------------------------------------------------------------------------

struct ParametrixResult {
    std::vector<RationalSymbol> terms; // q_0 .. q_N
    Rational tau;
    Poly base;
};

/// Checks that p is usable as a parametrix base: structurally positive, or
/// bounded away from zero on a sample sweep. Throws naming the offending
/// point otherwise.
inline void certify_nonvanishing(const Poly& p, unsigned long long seed = 99) {
    if (p.is_zero()) throw std::domain_error("parametrix: p is identically zero");
    if (p.structurally_positive()) return;
    AnnuliSpec spec;
    spec.rmin = 1.0;
    spec.rmax = 256;
    spec.n_radii = 10;
    spec.n_dirs = 48;
    spec.seed = seed;
    for (const auto& pt : sample_annuli(p.dim(), spec)) {
        double v = std::abs(p.eval(pt.xs, pt.xis));
        if (v < 1e-9) {
            std::string where = "(";
            for (double c : pt.xs) where += std::to_string(c) + ",";
            for (double c : pt.xis) where += std::to_string(c) + ",";
            throw std::domain_error("parametrix: p vanishes near " + where + ")");
        }
    }
}

/// The recursion of the parametrix theorem:
///   q_0 = 1/p,
///   q_j = -q_0 sum_{0<|eps+gamma|<=j} ((-1)^{|eps|}/(eps! gamma!)) tau^{|eps|} (1-tau)^{|gamma|}
///         (d_xi^gamma D_x^eps q_{j-|eps+gamma|}) (d_xi^eps D_x^gamma p).
inline ParametrixResult parametrix_terms(const Poly& p, const Rational& tau, int N) {
    if (N < 0 || N > 12) throw std::invalid_argument("parametrix_terms: order must be in [0, 12]");
    certify_nonvanishing(p);
    const int d = p.dim();
    Rational omt = Rational(1) - tau;
    MultiIndex ebound = p.max_exponent(Block::xi); // eps: d_xi on p
    MultiIndex gbound = p.max_exponent(Block::x);  // gamma: D_x on p

    ParametrixResult res;
    res.tau = tau;
    res.base = p;
    res.terms.push_back(RationalSymbol::reciprocal(p));
    for (int j = 1; j <= N; ++j) {
        RationalSymbol acc(Poly(d), p, 0);
        for (const MultiIndex& eps : enumerate_box(ebound)) {
            if (tau == 0 && mi_abs(eps) > 0) continue;
            for (const MultiIndex& gamma : enumerate_box(gbound)) {
                int step = mi_abs(eps) + mi_abs(gamma);
                if (step == 0 || step > j) continue;
                if (omt == 0 && mi_abs(gamma) > 0) continue;
                Poly dp = p.derive(Block::xi, eps).derive(Block::x, gamma, Deriv::D);
                if (dp.is_zero()) continue;
                RationalSymbol dq = res.terms[j - step].derive(Block::x, eps, Deriv::D).derive(Block::xi, gamma);
                if (dq.is_zero()) continue;
                Rational coef = rat_pow(tau, mi_abs(eps)) * rat_pow(omt, mi_abs(gamma)) /
                                Rational(mi_factorial(eps) * mi_factorial(gamma));
                if (mi_abs(eps) % 2) coef = -coef;
                acc += dq.times_poly(dp).scaled(RatC(coef));
            }
        }
        res.terms.push_back((res.terms[0] * acc).scaled(RatC(Rational(-1))));
    }
    return res;
}

/// Grading term r_j of the same-tau composition (sum_l q_l) o p:
///   r_j = sum_{l + |eps+gamma| = j} ((-1)^{|eps|}/(eps! gamma!)) tau^{|eps|} (1-tau)^{|gamma|}
///         (d_xi^gamma D_x^eps q_l) (d_xi^eps D_x^gamma p).
/// Implemented independently of the recursion loop above.
inline RationalSymbol parametrix_graded_term(const std::vector<RationalSymbol>& q, const Poly& p,
                                             const Rational& tau, int j) {
    const int d = p.dim();
    Rational omt = Rational(1) - tau;
    RationalSymbol r(Poly(d), p, 0);
    MultiIndex ebound = p.max_exponent(Block::xi);
    MultiIndex gbound = p.max_exponent(Block::x);
    for (const MultiIndex& eps : enumerate_box(ebound))
        for (const MultiIndex& gamma : enumerate_box(gbound)) {
            int step = mi_abs(eps) + mi_abs(gamma);
            int l = j - step;
            if (l < 0 || l >= static_cast<int>(q.size())) continue;
            Rational coef = rat_pow(tau, mi_abs(eps)) * rat_pow(omt, mi_abs(gamma)) /
                            Rational(mi_factorial(eps) * mi_factorial(gamma));
            if (coef == 0) continue;
            if (mi_abs(eps) % 2) coef = -coef;
            Poly dp = p.derive(Block::xi, eps).derive(Block::x, gamma, Deriv::D);
            if (dp.is_zero()) continue;
            RationalSymbol dq = q[l].derive(Block::x, eps, Deriv::D).derive(Block::xi, gamma);
            if (dq.is_zero()) continue;
            r += dq.times_poly(dp).scaled(RatC(coef));
        }
    return r;
}

/// Full same-tau composition q o p of a rational symbol with a polynomial
/// base; the expansion terminates at the degree of p, so the result is exact:
///   q o p = sum_{beta,gamma} ((-1)^{|beta|}/(beta! gamma!)) tau^{|beta|} (1-tau)^{|gamma|}
///           (d_xi^gamma D_x^beta q)(d_xi^beta D_x^gamma p).
inline RationalSymbol compose_rational_with_poly(const RationalSymbol& q, const Poly& p,
                                                 const Rational& tau) {
    const int d = p.dim();
    Rational omt = Rational(1) - tau;
    MultiIndex bbound = p.max_exponent(Block::xi);
    MultiIndex gbound = p.max_exponent(Block::x);
    RationalSymbol out(Poly(d), q.base(), 0);
    for (const MultiIndex& beta : enumerate_box(bbound)) {
        if (tau == 0 && mi_abs(beta) > 0) continue;
        for (const MultiIndex& gamma : enumerate_box(gbound)) {
            if (omt == 0 && mi_abs(gamma) > 0) continue;
            Poly dp = p.derive(Block::xi, beta).derive(Block::x, gamma, Deriv::D);
            if (dp.is_zero()) continue;
            RationalSymbol dq = q.derive(Block::x, beta, Deriv::D).derive(Block::xi, gamma);
            if (dq.is_zero()) continue;
            Rational coef = rat_pow(tau, mi_abs(beta)) * rat_pow(omt, mi_abs(gamma)) /
                            Rational(mi_factorial(beta) * mi_factorial(gamma));
            if (mi_abs(beta) % 2) coef = -coef;
            out += dq.times_poly(dp).scaled(RatC(coef));
        }
    }
    return out;
}

/// Exactness check: r_0 = 1 and r_j = 0 identically for 1 <= j <= N.
inline Report parametrix_verify(const ParametrixResult& res, const Poly& p) {
    Report rep;
    rep.title = "parametrix-verify";
    const int N = static_cast<int>(res.terms.size()) - 1;
    rep.add("order", N);
    RationalSymbol r0 = parametrix_graded_term(res.terms, p, res.tau, 0);
    bool ok0 = r0.equals_constant(RatC(1));
    rep.add("r_0_is_one", ok0);
    rep.pass = ok0;
    for (int j = 1; j <= N; ++j) {
        RationalSymbol rj = parametrix_graded_term(res.terms, p, res.tau, j);
        bool ok = rj.is_zero();
        rep.add("r_" + std::to_string(j) + "_is_zero", ok);
        if (!ok) {
            rep.add("r_" + std::to_string(j) + "_terms", static_cast<long long>(rj.numerator().term_count()));
            rep.pass = false;
        }
    }
    return rep;
}

/// Leading remainder of the truncated parametrix: composing sum_{l<=N} q_l
/// with p reproduces 1 through grade N exactly; the first surviving grade is
///   r_{N+1} = -q_{N+1} p,
/// evaluated here directly from the graded composition of the truncated list.
inline RationalSymbol truncated_remainder(const ParametrixResult& res, const Poly& p, int N) {
    std::vector<RationalSymbol> trunc(res.terms.begin(), res.terms.begin() + N + 1);
    return parametrix_graded_term(trunc, p, res.tau, N + 1);
}

struct DecayReport {
    std::vector<std::pair<int, double>> slopes; // (N, fitted slope)
    Report report;
};

/// Fits the log-log decay slope of |r_{N+1}| over geometric annuli. For a
/// symbol of order-2 growth like 1 + x^2 + xi^2 the slope is about -2(N+1);
/// the class estimate only demands <= -rho (N+1).
inline DecayReport residual_decay(const ParametrixResult& res, const Poly& p, int Nmax,
                                  double rmin = 16, double rmax = 512, int n_radii = 6,
                                  unsigned long long seed = 7) {
    if (Nmax + 1 > static_cast<int>(res.terms.size()) - 1)
        throw std::invalid_argument("residual_decay: need parametrix terms up to Nmax + 1");
    DecayReport out;
    out.report.title = "residual-decay";
    for (int N = 0; N <= Nmax; ++N) {
        RationalSymbol rem = truncated_remainder(res, p, N);
        AnnuliSpec spec;
        spec.rmin = rmin;
        spec.rmax = rmax;
        spec.n_radii = n_radii;
        spec.n_dirs = 24;
        spec.seed = seed;
        std::map<double, double> annulus_max;
        for (const auto& pt : sample_annuli(p.dim(), spec)) {
            double v = std::abs(rem.eval(pt.xs, pt.xis));
            auto& slot = annulus_max[pt.bracket];
            slot = std::max(slot, v);
        }
        // least-squares slope of log(max) against log(bracket)
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (const auto& [r, v] : annulus_max) {
            if (v <= 0) continue;
            double lx = std::log(r), ly = std::log(v);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++cnt;
        }
        double slope = cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx)
                                : -std::numeric_limits<double>::infinity();
        out.slopes.emplace_back(N, slope);
        out.report.add("slope.N" + std::to_string(N), slope);
    }
    out.report.pass = true;
    return out;
}

/// The assembled parametrix q = (inner excision) sum_j phi_j q_j; the inner
/// factor vanishes for <(x,xi)> <= R and equals 1 from 2R outward, removing
/// the region where 1/p carries no certified bound.
class AssembledParametrix {
public:
    AssembledParametrix(ParametrixResult res, CutoffFamily cutoffs, YoungConjugate conj)
        : res_(std::move(res)), cutoffs_(std::move(cutoffs)), conj_(std::move(conj)) {}

    std::complex<double> eval(std::span<const double> xs, std::span<const double> xis) const {
        std::vector<double> pt(xs.begin(), xs.end());
        pt.insert(pt.end(), xis.begin(), xis.end());
        double norm2 = 0;
        for (double c : pt) norm2 += c * c;
        double bracket = std::sqrt(1 + norm2);
        double inner = 1.0 - CutoffFamily::excision(1.0 + bracket / cutoffs_.R());
        if (inner == 0.0) return 0.0;
        std::complex<double> sum = 0;
        for (size_t j = 0; j < res_.terms.size(); ++j) {
            double cut = cutoffs_.phi_j(conj_, static_cast<long long>(j), pt);
            if (cut == 0.0) continue;
            sum += cut * res_.terms[j].eval(xs, xis);
        }
        return inner * sum;
    }

private:
    ParametrixResult res_;
    CutoffFamily cutoffs_;
    YoungConjugate conj_;
};

inline AssembledParametrix assemble_parametrix(const ParametrixResult& res, const CutoffFamily& cutoffs,
                                               const YoungConjugate& conj) {
    return AssembledParametrix(res, cutoffs, conj);
}

} // namespace psdo

#endif
