#ifndef PSDO_IO_HPP
#define PSDO_IO_HPP

#include "psdo/grid.hpp"
#include "psdo/quantization.hpp"
#include "psdo/symbol_variant.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace psdo {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Symbol file format. A record
//   { "dim": d, "representation": "poly" | "rational" | "expr", ... }
// with poly terms [{"x": [ints], "xi": [ints], "re": "rat", "im": "rat"}]
// (amplitudes add "y": [ints]), "numerator"/"base"/"power" for rational
// symbols and "expr" for expression symbols. Rationals travel as strings, so
// round trips are bit exact. Optional fields: "tau", "convention",
// "twopi_power" for quantized symbols.
// ---------------------------------------------------------------------------

namespace detail {
inline json exponents_to_json(const MultiIndex& e) { return json(e); }

inline MultiIndex exponents_from_json(const json& j, int dim, const char* field) {
    if (!j.is_array()) throw std::invalid_argument(std::string("symbol json: '") + field + "' must be an array");
    MultiIndex e = j.get<MultiIndex>();
    if (static_cast<int>(e.size()) != dim)
        throw std::invalid_argument(std::string("symbol json: multi-index '") + field + "' has length " +
                                    std::to_string(e.size()) + ", expected " + std::to_string(dim));
    for (int v : e)
        if (v < 0) throw std::invalid_argument(std::string("symbol json: negative exponent in '") + field + "'");
    return e;
}

inline json terms_to_json(const Poly& p) {
    json terms = json::array();
    for (const auto& [m, c] : p.terms()) {
        json t;
        t["x"] = exponents_to_json(m.x);
        if (p.is_amplitude()) t["y"] = exponents_to_json(m.y);
        t["xi"] = exponents_to_json(m.xi);
        t["re"] = to_string(c.re);
        t["im"] = to_string(c.im);
        terms.push_back(std::move(t));
    }
    return terms;
}

inline Poly terms_from_json(const json& terms, int dim, bool amplitude) {
    Poly p(dim, amplitude);
    if (!terms.is_array()) throw std::invalid_argument("symbol json: 'terms' must be an array");
    for (const auto& t : terms) {
        MultiIndex ex = exponents_from_json(t.at("x"), dim, "x");
        MultiIndex exi = exponents_from_json(t.at("xi"), dim, "xi");
        MultiIndex ey;
        if (amplitude)
            ey = exponents_from_json(t.at("y"), dim, "y");
        else if (t.contains("y"))
            throw std::invalid_argument("symbol json: unexpected 'y' exponents in a plain symbol");
        RatC c(parse_rational(t.at("re").get<std::string>()), parse_rational(t.at("im").get<std::string>()));
        p.add_term(std::move(ex), std::move(ey), std::move(exi), c);
    }
    return p;
}
} // namespace detail

inline json poly_to_json(const Poly& p) {
    json j;
    j["dim"] = p.dim();
    j["representation"] = p.is_amplitude() ? "amplitude" : "poly";
    j["terms"] = detail::terms_to_json(p);
    return j;
}

inline json symbol_to_json(const GenericSymbol& s) {
    if (const auto* p = std::get_if<Poly>(&s)) return poly_to_json(*p);
    if (const auto* r = std::get_if<RationalSymbol>(&s)) {
        json j;
        j["dim"] = r->dim();
        j["representation"] = "rational";
        j["numerator"] = detail::terms_to_json(r->numerator());
        j["base"] = detail::terms_to_json(r->base());
        j["power"] = r->power();
        return j;
    }
    const auto& e = std::get<ExprSymbol>(s);
    json j;
    j["dim"] = e.dim();
    j["representation"] = "expr";
    j["expr"] = e.to_string();
    if (e.prefactor() != std::complex<double>(1.0)) {
        j["prefactor_re"] = e.prefactor().real();
        j["prefactor_im"] = e.prefactor().imag();
    }
    return j;
}

inline GenericSymbol symbol_from_json(const json& j) {
    if (!j.contains("dim") || !j.contains("representation"))
        throw std::invalid_argument("symbol json: 'dim' and 'representation' are required");
    int dim = j.at("dim").get<int>();
    if (dim < 1) throw std::invalid_argument("symbol json: dim must be >= 1");
    std::string rep = j.at("representation").get<std::string>();
    if (rep == "poly" || rep == "amplitude")
        return GenericSymbol(detail::terms_from_json(j.at("terms"), dim, rep == "amplitude"));
    if (rep == "rational") {
        Poly num = detail::terms_from_json(j.at("numerator"), dim, false);
        Poly base = detail::terms_from_json(j.at("base"), dim, false);
        int power = j.at("power").get<int>();
        return GenericSymbol(RationalSymbol(std::move(num), std::move(base), power));
    }
    if (rep == "expr") {
        ExprSymbol e = ExprSymbol::parse(dim, j.at("expr").get<std::string>());
        if (j.contains("prefactor_re") || j.contains("prefactor_im"))
            e = e.with_prefactor({j.value("prefactor_re", 1.0), j.value("prefactor_im", 0.0)});
        return GenericSymbol(std::move(e));
    }
    throw std::invalid_argument("symbol json: unknown representation '" + rep + "'");
}

inline json quantized_to_json(const QuantizedSymbol& q) {
    json j = poly_to_json(q.symbol);
    j["tau"] = to_string(q.tau);
    j["convention"] = q.convention == Convention::paper ? "paper" : "normalized";
    if (q.twopi_power != 0) j["twopi_power"] = q.twopi_power;
    return j;
}

inline QuantizedSymbol quantized_from_json(const json& j, const Rational& default_tau = Rational(0),
                                           Convention default_conv = Convention::normalized) {
    GenericSymbol s = symbol_from_json(j);
    const auto* p = std::get_if<Poly>(&s);
    if (!p || p->is_amplitude())
        throw std::invalid_argument("quantized symbol json: polynomial symbol required");
    Rational tau = j.contains("tau") ? parse_rational(j.at("tau").get<std::string>()) : default_tau;
    Convention conv = default_conv;
    if (j.contains("convention")) {
        std::string c = j.at("convention").get<std::string>();
        if (c == "paper")
            conv = Convention::paper;
        else if (c == "normalized")
            conv = Convention::normalized;
        else
            throw std::invalid_argument("quantized symbol json: unknown convention '" + c + "'");
    }
    return QuantizedSymbol(*p, tau, conv, j.value("twopi_power", 0));
}

inline void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return j;
}

// ---------------------------------------------------------------------------
// Test-function specs: "hermite:k=3", "gaussian:center=0,width=1"
// ---------------------------------------------------------------------------

inline HermiteExpansion parse_testfn_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon == std::string::npos ? spec.size() : colon);
    std::map<std::string, double> kv;
    if (colon != std::string::npos) {
        size_t pos = colon + 1;
        while (pos < spec.size()) {
            size_t eq = spec.find('=', pos);
            size_t comma = spec.find(',', pos);
            if (comma == std::string::npos) comma = spec.size();
            if (eq == std::string::npos || eq > comma)
                throw std::invalid_argument("test-function spec: expected key=value in '" + spec + "'");
            kv[spec.substr(pos, eq - pos)] = std::stod(spec.substr(eq + 1, comma - eq - 1));
            pos = comma + 1;
        }
    }
    if (kind == "hermite") {
        if (!kv.count("k")) throw std::invalid_argument("hermite spec needs k=");
        int k = static_cast<int>(kv["k"]);
        if (k < 0) throw std::invalid_argument("hermite spec: k must be >= 0");
        return HermiteExpansion::mode1d(k);
    }
    if (kind == "gaussian")
        return gaussian_expansion(kv.count("center") ? kv["center"] : 0.0,
                                  kv.count("width") ? kv["width"] : 1.0);
    throw std::invalid_argument("unknown test-function spec '" + spec + "'");
}

} // namespace psdo

#endif
