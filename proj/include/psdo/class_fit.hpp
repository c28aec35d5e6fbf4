#ifndef PSDO_CLASS_FIT_HPP
#define PSDO_CLASS_FIT_HPP

#include "psdo/report.hpp"
#include "psdo/symbol_variant.hpp"
#include "psdo/weights.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace psdo {

/// Geometric annuli <(x,xi)> in [rmin, rmax], each sampled along axis
/// directions plus seeded random unit directions of R^{2d}.
struct AnnuliSpec {
    double rmin = 2, rmax = 100;
    int n_radii = 12;
    int n_dirs = 32;
    unsigned long long seed = 12345;
};

struct SamplePoint {
    std::vector<double> xs, xis;
    double bracket; // <(x,xi)>
};

inline std::vector<SamplePoint> sample_annuli(int dim, const AnnuliSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss;
    std::vector<std::vector<double>> dirs;
    for (int i = 0; i < 2 * dim; ++i) {
        std::vector<double> e(2 * dim, 0.0);
        e[i] = 1.0;
        dirs.push_back(e);
        e[i] = -1.0;
        dirs.push_back(std::move(e));
    }
    for (int i = 0; i < spec.n_dirs; ++i) {
        std::vector<double> v(2 * dim);
        double n2 = 0;
        for (double& c : v) {
            c = gauss(rng);
            n2 += c * c;
        }
        double n = std::sqrt(n2);
        for (double& c : v) c /= n;
        dirs.push_back(std::move(v));
    }
    std::vector<SamplePoint> pts;
    for (int k = 0; k < spec.n_radii; ++k) {
        double bracket = spec.rmin * std::pow(spec.rmax / spec.rmin,
                                              spec.n_radii == 1 ? 0.0 : static_cast<double>(k) / (spec.n_radii - 1));
        double norm = std::sqrt(std::max(0.0, bracket * bracket - 1.0));
        for (const auto& dir : dirs) {
            SamplePoint p;
            p.xs.assign(dir.begin(), dir.begin() + dim);
            p.xis.assign(dir.begin() + dim, dir.end());
            for (double& c : p.xs) c *= norm;
            for (double& c : p.xis) c *= norm;
            p.bracket = bracket;
            pts.push_back(std::move(p));
        }
    }
    return pts;
}

struct ClassFit {
    std::vector<std::pair<int, double>> constants; // (n, fitted C_n)
    bool diverged = false;
    std::string divergence_note;
};

/// Fits the global-symbol class constants: the least C_n with
///   |d^mu_x d^nu_xi a| <= C_n <(x,xi)>^{-rho |mu+nu|} e^{n rho phi*(|mu+nu|/n)} e^{m omega(x,xi)}
/// over the sampled region and |mu+nu| <= maxorder, for each n in `ns`.
/// Divergence (across derivative order or outward through the annuli) flags
/// class-membership failure.
inline ClassFit estimate_class_constants(const GenericSymbol& a, const WeightFunction& w, double m,
                                         double rho, const AnnuliSpec& region, int maxorder,
                                         std::vector<int> ns = {1, 2, 4}) {
    const int dim = symbol_dim(a);
    YoungConjugate conj(w);
    DerivativeBank bank(a, maxorder);
    auto pts = sample_annuli(dim, region);
    const JetSpace& space = JetSpace::get(2 * dim, maxorder);

    ClassFit fit;
    std::vector<double> inner_max(ns.size(), 0.0), outer_max(ns.size(), 0.0);
    std::vector<double> low_order_max(ns.size(), 0.0), high_order_max(ns.size(), 0.0);
    double r_split = std::sqrt(region.rmin * region.rmax);

    for (const auto& pt : pts) {
        PartialTable table = bank.at(pt.xs, pt.xis);
        std::vector<double> pt_xy(pt.xs);
        pt_xy.insert(pt_xy.end(), pt.xis.begin(), pt.xis.end());
        double omega_val = w.at_point(pt_xy);
        for (size_t ni = 0; ni < ns.size(); ++ni) {
            int n = ns[ni];
            for (size_t i = 0; i < space.idx.size(); ++i) {
                int total = mi_abs(space.idx[i]);
                double bound = std::pow(pt.bracket, -rho * total) *
                               std::exp(n * rho * conj(static_cast<double>(total) / n)) *
                               std::exp(m * omega_val);
                double ratio = std::abs(table.raw()[i]) / bound;
                if (pt.bracket <= r_split)
                    inner_max[ni] = std::max(inner_max[ni], ratio);
                else
                    outer_max[ni] = std::max(outer_max[ni], ratio);
                if (total <= maxorder / 2)
                    low_order_max[ni] = std::max(low_order_max[ni], ratio);
                else
                    high_order_max[ni] = std::max(high_order_max[ni], ratio);
            }
        }
    }
    for (size_t ni = 0; ni < ns.size(); ++ni) {
        double C = std::max(inner_max[ni], outer_max[ni]);
        fit.constants.emplace_back(ns[ni], C);
        if (!std::isfinite(C) || (outer_max[ni] > 1e3 * std::max(inner_max[ni], 1e-300))) {
            fit.diverged = true;
            fit.divergence_note = "constant grows outward through the annuli (n=" + std::to_string(ns[ni]) + ")";
        }
        if (high_order_max[ni] > 1e3 * std::max(low_order_max[ni], 1.0)) {
            fit.diverged = true;
            fit.divergence_note = "constant grows with derivative order (n=" + std::to_string(ns[ni]) + ")";
        }
    }
    return fit;
}

inline Report class_fit_report(const ClassFit& fit, const std::string& what) {
    Report rep;
    rep.title = "class-constants(" + what + ")";
    for (const auto& [n, C] : fit.constants) rep.add("C_" + std::to_string(n), C);
    rep.add("diverged", fit.diverged);
    if (fit.diverged) rep.add("note", fit.divergence_note);
    rep.pass = !fit.diverged;
    return rep;
}

} // namespace psdo

#endif
