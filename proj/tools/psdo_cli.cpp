// psdo: global pseudodifferential symbol calculus
//
// Subcommands: weights check|conj, symbol derive|classfit|reduce,
// calc change-quant|transpose|compose|weyl|identities,
// parametrix build|verify|decay, hypo check|invariance,
// oracle compare|grid-apply, suite all.
//
// Exit status: 0 all assertions pass, 1 assertion failure, 2 config/parse error.

#include "psdo/class_fit.hpp"
#include "psdo/formal_sum.hpp"
#include "psdo/grid.hpp"
#include "psdo/hermite.hpp"
#include "psdo/io.hpp"
#include "psdo/parametrix.hpp"
#include "psdo/quantization.hpp"
#include "psdo/weights.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

using namespace psdo;

namespace {

struct Session {
    std::vector<Report> reports;
    std::string out_path;
    unsigned long long seed = 12345;
    bool failed = false;

    void add(Report r) {
        if (!r.pass) failed = true;
        reports.push_back(std::move(r));
    }
    void assert_that(const std::string& what, bool ok, const std::string& detail = "") {
        Report r;
        r.title = what;
        r.pass = ok;
        if (!detail.empty()) r.add("detail", detail);
        add(std::move(r));
    }

    int finish() {
        for (const auto& r : reports) r.print_human(std::cout);
        std::cout << (failed ? "overall = FAIL" : "overall = PASS") << "\n";
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) {
                std::cerr << "cannot write report file '" << out_path << "'\n";
                return 2;
            }
            out << "seed=" << seed << "\n";
            for (const auto& r : reports) {
                r.print_records(out);
                out << "\n";
            }
            out << "overall=" << (failed ? "FAIL" : "PASS") << "\n";
        }
        return failed ? 1 : 0;
    }
};

Poly load_poly(const std::string& path, bool allow_amplitude = false) {
    GenericSymbol s = symbol_from_json(load_json(path));
    const auto* p = std::get_if<Poly>(&s);
    if (!p) throw std::invalid_argument(path + ": polynomial symbol required");
    if (p->is_amplitude() && !allow_amplitude)
        throw std::invalid_argument(path + ": expected a symbol, found an amplitude");
    return *p;
}

MultiIndex parse_multiindex(const std::string& s, int dim) {
    if (s.empty()) return MultiIndex(dim, 0);
    MultiIndex idx;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        idx.push_back(std::stoi(s.substr(pos, comma - pos)));
        if (comma == s.size()) break;
        pos = comma + 1;
    }
    if (static_cast<int>(idx.size()) != dim)
        throw std::invalid_argument("multi-index '" + s + "' must have " + std::to_string(dim) + " entries");
    for (int v : idx)
        if (v < 0) throw std::invalid_argument("multi-index entries must be >= 0");
    return idx;
}

std::vector<HermiteExpansion> make_test_set(int dim, int kmax, int n_random, std::mt19937_64& rng) {
    auto set = basis_test_set(dim, kmax);
    for (int i = 0; i < n_random; ++i) set.push_back(random_expansion(rng, dim, kmax, 5));
    return set;
}

Report oracle_report(const std::string& what, const OracleError& e, double tol) {
    Report r;
    r.title = "oracle(" + what + ")";
    r.add("max_rel_error", e.max_rel);
    r.add("tolerance", tol);
    if (!e.worst.empty()) r.add("worst_input", e.worst);
    r.pass = e.max_rel <= tol;
    return r;
}

Poly random_poly_cli(std::mt19937_64& rng, int dim, int maxdeg, int nterms) {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> pick(0, 2 * dim - 1);
    std::uniform_int_distribution<int> deg(0, maxdeg);
    Poly p(dim);
    for (int t = 0; t < nterms; ++t) {
        MultiIndex ex(dim, 0), exi(dim, 0);
        int total = deg(rng);
        for (int step = 0; step < total; ++step) {
            int slot = pick(rng);
            (slot < dim ? ex[slot] : exi[slot - dim])++;
        }
        RatC c(Rational(num(rng)), Rational(num(rng)));
        if (c.is_zero()) c = RatC(1);
        p.add_term(ex, exi, c);
    }
    return p;
}

Poly oscillator1d() {
    Poly x = Poly::variable(1, Block::x, 0), xi = Poly::variable(1, Block::xi, 0);
    return Poly::constant(1, RatC(1)) + x * x + xi * xi;
}

void run_suite_all(Session& s) {
    std::mt19937_64 rng(s.seed);
    const Rational half(1, 2);

    // weights
    for (const auto& w : {WeightFunction::gevrey(0.5), WeightFunction::logpower(2.0)}) {
        s.add(verify_weight_axioms(w, 400));
        s.add(verify_conjugate_inequalities(w));
    }
    {
        YoungConjugate conj(WeightFunction::gevrey(0.5));
        bool ok = true;
        for (double y = 1e-3; y < 100; y *= 1.41)
            ok = ok && std::abs(conj.numeric(y) - conj.closed_form(y)) <= 1e-8 * (1 + conj.closed_form(y));
        s.assert_that("young-conjugate numeric vs closed form", ok);
        bool stab = true;
        for (double B : {1.0, 2.0, 4.0}) stab = stab && fit_factorial_bound(conj, B, 1.0, 1.0).stabilized;
        s.assert_that("factorial bound stabilizes", stab);
    }

    // combinatorial identities
    s.add(check_vandermonde(12));
    s.add(check_composition_rearrangement(2, 6));

    // quantization battery
    {
        const std::vector<Rational> taus{Rational(-1), Rational(0), Rational(1, 3), half, Rational(1), Rational(2)};
        bool ok = true;
        for (int t = 0; t < 60 && ok; ++t) {
            int dim = 1 + static_cast<int>(rng() % 3);
            Poly p = random_poly_cli(rng, dim, 6, 5);
            const Rational &t1 = taus[rng() % taus.size()], &t2 = taus[rng() % taus.size()],
                           &t3 = taus[rng() % taus.size()];
            QuantizedSymbol a(p, t1);
            auto via = change_quantization(a, t2);
            ok = ok && change_quantization(via, t1).symbol == p &&
                 change_quantization(via, t3).symbol == change_quantization(a, t3).symbol &&
                 transpose_tau(transpose_tau(a)).symbol == p;
        }
        s.assert_that("round-trip / cocycle / double-transpose (exact)", ok);
    }

    // hermite oracles
    {
        auto set = make_test_set(1, 12, 8, rng);
        OracleError worst;
        const std::vector<Rational> taus{Rational(0), half, Rational(1)};
        for (int t = 0; t < 10; ++t) {
            Poly p = random_poly_cli(rng, 1, 4, 4);
            auto e = oracle_quantization_error(p, taus[rng() % taus.size()], taus[rng() % taus.size()], set);
            if (e.max_rel > worst.max_rel) worst = e;
        }
        s.add(oracle_report("quantizations, 10 random symbols", worst, 1e-10));

        worst = OracleError{};
        for (int t = 0; t < 10; ++t) {
            const Rational& tau = taus[rng() % taus.size()];
            QuantizedSymbol a(random_poly_cli(rng, 1, 3, 4), tau), b(random_poly_cli(rng, 1, 3, 4), tau);
            auto e = oracle_composition_error(a, b, compose_tau(a, b), set);
            if (e.max_rel > worst.max_rel) worst = e;
        }
        s.add(oracle_report("composition, 10 random pairs", worst, 1e-10));

        worst = OracleError{};
        for (int t = 0; t < 8; ++t) {
            QuantizedSymbol a(random_poly_cli(rng, 1, 4, 4), taus[rng() % taus.size()]);
            auto e = oracle_transpose_error(a, set);
            if (e.max_rel > worst.max_rel) worst = e;
        }
        s.add(oracle_report("transpose pairing, 8 random symbols", worst, 1e-10));

        worst = OracleError{};
        for (int t = 0; t < 6; ++t) {
            Poly amp(1, true);
            std::uniform_int_distribution<int> e(0, 2), num(-3, 3);
            for (int k = 0; k < 3; ++k)
                amp.add_term({e(rng)}, {e(rng)}, {e(rng)}, RatC(Rational(num(rng)), Rational(num(rng))));
            if (amp.is_zero()) continue;
            auto err = oracle_amplitude_error(amp, taus[rng() % taus.size()], set);
            if (err.max_rel > worst.max_rel) worst = err;
        }
        s.add(oracle_report("amplitude reduction, 6 random amplitudes", worst, 1e-10));
    }

    // parametrix
    for (const Rational& tau : {Rational(0), half}) {
        auto res = parametrix_terms(oscillator1d(), tau, 4);
        s.add(parametrix_verify(res, oscillator1d()));
    }
    {
        auto res = parametrix_terms(oscillator1d(), Rational(0), 5);
        auto decay = residual_decay(res, oscillator1d(), 4);
        bool ok = true;
        double prev = 0;
        for (const auto& [N, slope] : decay.slopes) {
            ok = ok && slope <= -(N + 1) + 0.2 && slope < prev;
            prev = slope;
        }
        decay.report.pass = ok;
        s.add(decay.report);
    }

    // hypoellipticity
    {
        HypoParams hp;
        AnnuliSpec region;
        region.rmin = 2;
        region.rmax = 100;
        region.seed = s.seed;
        auto osc = check_hypoelliptic(GenericSymbol(oscillator1d()), WeightFunction::gevrey(0.5), hp, region);
        s.assert_that("oscillator is omega-hypoelliptic on the sampled region", osc.passes);

        Poly a = Poly::variable(2, Block::xi, 0) - Poly::variable(2, Block::x, 1).scaled(RatC(Rational(1, 2)));
        Poly b = Poly::variable(2, Block::xi, 1) - Poly::variable(2, Block::x, 0).scaled(RatC(Rational(1, 2)));
        Poly twisted = a * a + b * b;
        auto tw = check_hypoelliptic(GenericSymbol(twisted), WeightFunction::gevrey(0.5), hp, region);
        s.assert_that("twisted laplacian fails condition (i)", !tw.passes && !tw.lower_ok);
    }

    // grid quadrature
    {
        GridSpec g{512, 12};
        GridFunction u = sample_hermite(g, 2);
        GridFunction id = grid_apply_op_tau(GenericSymbol(Poly::constant(1, RatC(1))), Rational(0), u);
        s.assert_that("grid identity", (id - u).max_abs() <= 1e-8 * u.max_abs());

        Poly xxi = Poly::variable(1, Block::x, 0) * Poly::variable(1, Block::xi, 0);
        auto h2 = HermiteExpansion::mode1d(2);
        GridFunction expect = sample_expansion(g, quantize_to_operator(xxi, half).apply(h2));
        GridFunction got = grid_apply_op_tau(GenericSymbol(xxi), half, sample_expansion(g, h2));
        s.assert_that("grid weyl x*xi vs ladder", (got - expect).max_abs() <= 1e-6 * expect.max_abs());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"global pseudodifferential symbol calculus"};
    app.require_subcommand(1);
    Session session;

    std::string weight_spec = "gevrey:a=0.5", sigma_spec, in_path, out_path, a_path, b_path;
    std::string tau_s = "0", tau1_s = "0", tau2_s = "1/2", target_s = "0";
    std::string dx_s, dxi_s, kind_s = "partial", convention_s = "normalized";
    std::string testfn_spec = "hermite:k=0", grid_spec = "n=1024,xmax=12", oracle_kind = "quantizations";
    int samples = 400, order = 4, maxorder = 4, kmax = 12, max_mnr = 12, bbr_d = 2, bbr_total = 6;
    double m_param = 0, m0_param = 0, rho = 1, rmin = 2, rmax = 100, Rconst = 2;
    double decay_rmin = 16, decay_rmax = 512;

    app.add_option("--report", session.out_path, "write machine-readable records to this file");
    app.add_option("--seed", session.seed, "seed for randomized batteries");

    auto* weights = app.add_subcommand("weights", "weight-function subsystem");
    weights->require_subcommand(1);
    auto* w_check = weights->add_subcommand("check", "verify the weight axioms");
    w_check->add_option("--weight", weight_spec);
    w_check->add_option("--samples", samples);
    auto* w_conj = weights->add_subcommand("conj", "Young conjugate and inequality battery");
    w_conj->add_option("--weight", weight_spec);

    auto* symbol = app.add_subcommand("symbol", "symbol manipulation");
    symbol->require_subcommand(1);
    auto* s_derive = symbol->add_subcommand("derive", "differentiate a symbol");
    s_derive->add_option("--in", in_path)->required();
    s_derive->add_option("--dx", dx_s);
    s_derive->add_option("--dxi", dxi_s);
    s_derive->add_option("--kind", kind_s)->check(CLI::IsMember({"partial", "D"}));
    s_derive->add_option("--out", out_path);
    auto* s_classfit = symbol->add_subcommand("classfit", "fit global-symbol class constants");
    s_classfit->add_option("--in", in_path)->required();
    s_classfit->add_option("--weight", weight_spec);
    s_classfit->add_option("--m", m_param);
    s_classfit->add_option("--rho", rho);
    s_classfit->add_option("--rmin", rmin);
    s_classfit->add_option("--rmax", rmax);
    s_classfit->add_option("--maxorder", maxorder);
    auto* s_reduce = symbol->add_subcommand("reduce", "reduce an amplitude to its tau-symbol grades");
    s_reduce->add_option("--in", in_path)->required();
    s_reduce->add_option("--tau", tau_s);
    s_reduce->add_option("--out", out_path);

    auto* calc = app.add_subcommand("calc", "quantization calculus");
    calc->require_subcommand(1);
    auto* c_change = calc->add_subcommand("change-quant", "change of quantization");
    c_change->add_option("--in", in_path)->required();
    c_change->add_option("--from", tau1_s);
    c_change->add_option("--to", tau2_s);
    c_change->add_option("--out", out_path);
    auto* c_transpose = calc->add_subcommand("transpose", "tau-symbol of the transpose");
    c_transpose->add_option("--in", in_path)->required();
    c_transpose->add_option("--tau", tau_s);
    c_transpose->add_option("--out", out_path);
    auto* c_compose = calc->add_subcommand("compose", "composition of quantized symbols");
    c_compose->add_option("--a", a_path)->required();
    c_compose->add_option("--b", b_path)->required();
    auto* same_tau_opt = c_compose->add_option("--tau", tau_s, "same-tau composition");
    c_compose->add_option("--tau1", tau1_s);
    c_compose->add_option("--tau2", tau2_s);
    c_compose->add_option("--target", target_s);
    c_compose->add_option("--convention", convention_s)->check(CLI::IsMember({"normalized", "paper"}));
    c_compose->add_option("--out", out_path);
    auto* c_weyl = calc->add_subcommand("weyl", "Weyl composition (tau = 1/2)");
    c_weyl->add_option("--a", a_path)->required();
    c_weyl->add_option("--b", b_path)->required();
    c_weyl->add_option("--convention", convention_s)->check(CLI::IsMember({"normalized", "paper"}));
    c_weyl->add_option("--out", out_path);
    auto* c_identities = calc->add_subcommand("identities", "combinatorial identity sweeps");
    c_identities->add_option("--max-mnr", max_mnr);
    c_identities->add_option("--d", bbr_d);
    c_identities->add_option("--max-total", bbr_total);

    auto* parametrix = app.add_subcommand("parametrix", "parametrix construction");
    parametrix->require_subcommand(1);
    auto* p_build = parametrix->add_subcommand("build", "run the recursion");
    p_build->add_option("--symbol", in_path)->required();
    p_build->add_option("--tau", tau_s);
    p_build->add_option("--order", order);
    p_build->add_option("--out", out_path);
    auto* p_verify = parametrix->add_subcommand("verify", "check r_0 = 1 and r_j = 0 exactly");
    p_verify->add_option("--symbol", in_path)->required();
    p_verify->add_option("--tau", tau_s);
    p_verify->add_option("--order", order);
    auto* p_decay = parametrix->add_subcommand("decay", "residual decay slopes");
    p_decay->add_option("--symbol", in_path)->required();
    p_decay->add_option("--tau", tau_s);
    p_decay->add_option("--orders", order, "fit N = 0..orders");
    p_decay->add_option("--rho", rho);
    p_decay->add_option("--rmin", decay_rmin);
    p_decay->add_option("--rmax", decay_rmax);

    auto* hypo = app.add_subcommand("hypo", "hypoellipticity");
    hypo->require_subcommand(1);
    auto* h_check = hypo->add_subcommand("check", "fit the HGS conditions");
    h_check->add_option("--symbol", in_path)->required();
    h_check->add_option("--weight", weight_spec);
    h_check->add_option("--sigma", sigma_spec);
    h_check->add_option("--rho", rho);
    h_check->add_option("--m", m_param);
    h_check->add_option("--m0", m0_param);
    h_check->add_option("--R", Rconst);
    h_check->add_option("--rmin", rmin);
    h_check->add_option("--rmax", rmax);
    h_check->add_option("--maxorder", maxorder);
    auto* h_inv = hypo->add_subcommand("invariance", "refit after a change of quantization");
    h_inv->add_option("--symbol", in_path)->required();
    h_inv->add_option("--weight", weight_spec);
    h_inv->add_option("--sigma", sigma_spec);
    h_inv->add_option("--tau1", tau1_s);
    h_inv->add_option("--tau2", tau2_s);
    h_inv->add_option("--rho", rho);
    h_inv->add_option("--m", m_param);
    h_inv->add_option("--rmin", rmin);
    h_inv->add_option("--rmax", rmax);

    auto* oracle = app.add_subcommand("oracle", "hermite and grid oracles");
    oracle->require_subcommand(1);
    auto* o_compare = oracle->add_subcommand("compare", "operator-level comparisons");
    o_compare->add_option("--kind", oracle_kind)
        ->check(CLI::IsMember({"quantizations", "composition", "transpose", "amplitude"}));
    o_compare->add_option("--a", a_path)->required();
    o_compare->add_option("--b", b_path);
    o_compare->add_option("--tau", tau_s);
    o_compare->add_option("--tau1", tau1_s);
    o_compare->add_option("--tau2", tau2_s);
    o_compare->add_option("--kmax", kmax);
    auto* o_grid = oracle->add_subcommand("grid-apply", "apply a tau-quantized symbol on the grid");
    o_grid->add_option("--symbol", in_path)->required();
    o_grid->add_option("--tau", tau_s);
    o_grid->add_option("--testfn", testfn_spec);
    o_grid->add_option("--grid", grid_spec);
    o_grid->add_option("--out", out_path);

    auto* suite = app.add_subcommand("suite", "batteries");
    suite->require_subcommand(1);
    auto* suite_all = suite->add_subcommand("all", "full property battery");

    try {
        app.parse(argc, argv);

        if (w_check->parsed()) {
            session.add(verify_weight_axioms(WeightFunction::parse(weight_spec), samples));
        } else if (w_conj->parsed()) {
            auto w = WeightFunction::parse(weight_spec);
            session.add(verify_conjugate_inequalities(w));
            YoungConjugate conj(w);
            Report r;
            r.title = "young-conjugate(" + w.spec() + ")";
            r.add("phi_star_0", conj(0.0));
            r.pass = conj(0.0) == 0.0;
            if (w.family() == WeightFamily::gevrey) {
                double worst = 0;
                for (double y = 1e-3; y < 100; y *= 1.41)
                    worst = std::max(worst, std::abs(conj.numeric(y) - conj.closed_form(y)) /
                                                (1 + std::abs(conj.closed_form(y))));
                r.add("numeric_vs_closed_rel", worst);
                r.pass = r.pass && worst <= 1e-8;
                auto border = fit_factorial_bound(conj, 2.0, 1.0, w.param());
                r.add("factorial_fit.borderline_C", border.C);
                r.add("factorial_fit.borderline_stabilized", border.stabilized);
            }
            for (double B : {1.0, 2.0, 4.0}) {
                auto fit = fit_factorial_bound(conj, B, 1.0, 1.0);
                r.add("factorial_fit.B" + std::to_string(static_cast<int>(B)) + "_C", fit.C);
                r.pass = r.pass && fit.stabilized;
            }
            session.add(std::move(r));
        } else if (s_derive->parsed()) {
            GenericSymbol s = symbol_from_json(load_json(in_path));
            int dim = symbol_dim(s);
            MultiIndex dx = parse_multiindex(dx_s, dim), dxi = parse_multiindex(dxi_s, dim);
            Deriv kind = kind_s == "D" ? Deriv::D : Deriv::partial;
            GenericSymbol result;
            if (const auto* p = std::get_if<Poly>(&s))
                result = p->derive(Block::x, dx, kind).derive(Block::xi, dxi, kind);
            else if (const auto* rs = std::get_if<RationalSymbol>(&s))
                result = rs->derive(Block::x, dx, kind).derive(Block::xi, dxi, kind);
            else
                result = std::get<ExprSymbol>(s).derive(dx, dxi, kind == Deriv::D);
            json out = symbol_to_json(result);
            if (!out_path.empty()) save_json(out, out_path);
            std::cout << out.dump(2) << "\n";
            return 0;
        } else if (s_classfit->parsed()) {
            AnnuliSpec region;
            region.rmin = rmin;
            region.rmax = rmax;
            region.seed = session.seed;
            auto fit = estimate_class_constants(symbol_from_json(load_json(in_path)),
                                                WeightFunction::parse(weight_spec), m_param, rho, region,
                                                maxorder);
            session.add(class_fit_report(fit, in_path));
        } else if (s_reduce->parsed()) {
            Poly amp = load_poly(in_path, true);
            if (!amp.is_amplitude()) throw std::invalid_argument(in_path + ": amplitude a(x,y,xi) required");
            auto grades = amplitude_reduce(amp, parse_rational(tau_s));
            json out;
            out["tau"] = tau_s;
            out["grades"] = json::array();
            Poly total(amp.dim());
            for (const auto& g : grades) {
                out["grades"].push_back(poly_to_json(g));
                total += g;
            }
            out["total"] = poly_to_json(total);
            if (!out_path.empty()) save_json(out, out_path);
            std::cout << out.dump(2) << "\n";
            return 0;
        } else if (c_change->parsed()) {
            QuantizedSymbol a(load_poly(in_path), parse_rational(tau1_s));
            auto out = quantized_to_json(change_quantization(a, parse_rational(tau2_s)));
            if (!out_path.empty()) save_json(out, out_path);
            std::cout << out.dump(2) << "\n";
            return 0;
        } else if (c_transpose->parsed()) {
            QuantizedSymbol a(load_poly(in_path), parse_rational(tau_s));
            auto out = quantized_to_json(transpose_tau(a));
            if (!out_path.empty()) save_json(out, out_path);
            std::cout << out.dump(2) << "\n";
            return 0;
        } else if (c_compose->parsed()) {
            Convention conv = convention_s == "paper" ? Convention::paper : Convention::normalized;
            QuantizedSymbol result;
            if (same_tau_opt->count()) {
                Rational tau = parse_rational(tau_s);
                result = compose_tau(QuantizedSymbol(load_poly(a_path), tau, conv),
                                     QuantizedSymbol(load_poly(b_path), tau, conv));
            } else {
                result = compose_general(QuantizedSymbol(load_poly(a_path), parse_rational(tau1_s), conv),
                                         QuantizedSymbol(load_poly(b_path), parse_rational(tau2_s), conv),
                                         parse_rational(target_s));
            }
            auto out = quantized_to_json(result);
            if (!out_path.empty()) save_json(out, out_path);
            std::cout << out.dump(2) << "\n";
            return 0;
        } else if (c_weyl->parsed()) {
            Convention conv = convention_s == "paper" ? Convention::paper : Convention::normalized;
            Rational half(1, 2);
            auto out = quantized_to_json(weyl_compose(QuantizedSymbol(load_poly(a_path), half, conv),
                                                      QuantizedSymbol(load_poly(b_path), half, conv)));
            if (!out_path.empty()) save_json(out, out_path);
            std::cout << out.dump(2) << "\n";
            return 0;
        } else if (c_identities->parsed()) {
            session.add(check_vandermonde(max_mnr));
            session.add(check_composition_rearrangement(bbr_d, bbr_total));
        } else if (p_build->parsed()) {
            auto res = parametrix_terms(load_poly(in_path), parse_rational(tau_s), order);
            json out;
            out["tau"] = tau_s;
            out["base"] = poly_to_json(res.base);
            out["terms"] = json::array();
            for (const auto& q : res.terms) out["terms"].push_back(symbol_to_json(GenericSymbol(q)));
            if (!out_path.empty()) save_json(out, out_path);
            std::cout << out.dump(2) << "\n";
            return 0;
        } else if (p_verify->parsed()) {
            Poly p = load_poly(in_path);
            auto res = parametrix_terms(p, parse_rational(tau_s), order);
            session.add(parametrix_verify(res, p));
        } else if (p_decay->parsed()) {
            Poly p = load_poly(in_path);
            auto res = parametrix_terms(p, parse_rational(tau_s), order + 1);
            auto decay = residual_decay(res, p, order, decay_rmin, decay_rmax);
            bool ok = true;
            double prev = 0;
            for (const auto& [N, slope] : decay.slopes) {
                ok = ok && slope <= -rho * (N + 1) + 0.2 && slope < prev;
                prev = slope;
            }
            decay.report.pass = ok;
            session.add(decay.report);
        } else if (h_check->parsed()) {
            HypoParams hp;
            hp.m = m_param;
            hp.m0 = m0_param;
            hp.rho = rho;
            hp.R = Rconst;
            hp.maxorder = maxorder;
            if (!sigma_spec.empty()) hp.sigma = WeightFunction::parse(sigma_spec);
            AnnuliSpec region;
            region.rmin = rmin;
            region.rmax = rmax;
            region.seed = session.seed;
            auto check = check_hypoelliptic(symbol_from_json(load_json(in_path)),
                                            WeightFunction::parse(weight_spec), hp, region);
            check.report.add("passes", check.passes);
            session.add(check.report);
        } else if (h_inv->parsed()) {
            HypoParams hp;
            hp.m = m_param;
            hp.m0 = m_param; // the invariance theorem covers m0 = m
            hp.rho = rho;
            if (!sigma_spec.empty()) hp.sigma = WeightFunction::parse(sigma_spec);
            AnnuliSpec region;
            region.rmin = rmin;
            region.rmax = rmax;
            region.seed = session.seed;
            auto inv = hypo_invariance_check(load_poly(in_path), parse_rational(tau1_s),
                                             parse_rational(tau2_s), WeightFunction::parse(weight_spec),
                                             hp, region);
            session.add(inv.report);
        } else if (o_compare->parsed()) {
            std::mt19937_64 rng(session.seed);
            auto set = make_test_set(1, kmax, 20, rng);
            if (oracle_kind == "quantizations") {
                auto e = oracle_quantization_error(load_poly(a_path), parse_rational(tau1_s),
                                                   parse_rational(tau2_s), set);
                session.add(oracle_report("quantizations", e, 1e-10));
            } else if (oracle_kind == "composition") {
                Rational tau = parse_rational(tau_s);
                QuantizedSymbol a(load_poly(a_path), tau), b(load_poly(b_path), tau);
                session.add(
                    oracle_report("composition", oracle_composition_error(a, b, compose_tau(a, b), set), 1e-10));
            } else if (oracle_kind == "transpose") {
                QuantizedSymbol a(load_poly(a_path), parse_rational(tau_s));
                session.add(oracle_report("transpose", oracle_transpose_error(a, set), 1e-10));
            } else {
                Poly amp = load_poly(a_path, true);
                session.add(
                    oracle_report("amplitude", oracle_amplitude_error(amp, parse_rational(tau_s), set), 1e-10));
            }
        } else if (o_grid->parsed()) {
            GridSpec g = GridSpec::parse(grid_spec);
            GridFunction u = sample_expansion(g, parse_testfn_spec(testfn_spec));
            GridFunction v = grid_apply_op_tau(symbol_from_json(load_json(in_path)), parse_rational(tau_s), u);
            json out;
            out["grid"] = {{"n", g.n}, {"xmax", g.xmax}};
            out["values"] = json::array();
            for (const auto& c : v.values) out["values"].push_back({c.real(), c.imag()});
            if (!out_path.empty()) save_json(out, out_path);
            std::cout << "applied " << in_path << " at tau=" << tau_s << " on n=" << g.n
                      << "; max |value| = " << v.max_abs() << "\n";
            return 0;
        } else if (suite_all->parsed()) {
            run_suite_all(session);
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return session.finish();
}
