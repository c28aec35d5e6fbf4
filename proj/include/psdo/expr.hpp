#ifndef PSDO_EXPR_HPP
#define PSDO_EXPR_HPP

#include "psdo/multiindex.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace psdo {

/// Index bookkeeping for truncated multivariate Taylor (jet) coefficients:
/// all multi-indices of order <= K over nvars variables, graded-lex.
struct JetSpace {
    int nvars, order;
    std::vector<MultiIndex> idx;
    std::map<MultiIndex, int> pos;

    static const JetSpace& get(int nvars, int order) {
        static std::mutex mu;
        static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
        std::lock_guard lock(mu);
        auto& slot = cache[{nvars, order}];
        if (!slot) {
            slot = std::make_unique<JetSpace>();
            slot->nvars = nvars;
            slot->order = order;
            slot->idx = enumerate_upto(nvars, order);
            for (size_t i = 0; i < slot->idx.size(); ++i) slot->pos.emplace(slot->idx[i], static_cast<int>(i));
        }
        return *slot;
    }
};

/// Truncated Taylor expansion at a point; coefficient of the monomial
/// (z - z0)^mu sits at space->pos[mu]. Products truncate at the jet order.
struct Jet {
    const JetSpace* space = nullptr;
    std::vector<std::complex<double>> c;

    Jet() = default;
    explicit Jet(const JetSpace& s) : space(&s), c(s.idx.size(), 0.0) {}

    static Jet constant(const JetSpace& s, std::complex<double> v) {
        Jet j(s);
        j.c[0] = v;
        return j;
    }
    static Jet variable(const JetSpace& s, int axis, double value) {
        Jet j(s);
        j.c[0] = value;
        MultiIndex e(s.nvars, 0);
        e[axis] = 1;
        if (s.order >= 1) j.c[s.pos.at(e)] = 1.0;
        return j;
    }

    Jet& operator+=(const Jet& o) {
        for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    Jet operator-() const {
        Jet r = *this;
        for (auto& v : r.c) v = -v;
        return r;
    }
    friend Jet operator-(Jet a, const Jet& b) { return a + (-b); }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const JetSpace& s = *a.space;
        Jet r(s);
        for (size_t i = 0; i < a.c.size(); ++i) {
            if (a.c[i] == 0.0) continue;
            int oi = mi_abs(s.idx[i]);
            for (size_t j = 0; j < b.c.size(); ++j) {
                if (b.c[j] == 0.0) continue;
                if (oi + mi_abs(s.idx[j]) > s.order) continue;
                r.c[s.pos.at(mi_add(s.idx[i], s.idx[j]))] += a.c[i] * b.c[j];
            }
        }
        return r;
    }

    Jet scaled(std::complex<double> v) const {
        Jet r = *this;
        for (auto& x : r.c) x *= v;
        return r;
    }

    /// 1/f, requiring a nonzero constant term.
    Jet inverse() const {
        const JetSpace& s = *space;
        std::complex<double> c0 = c[0];
        if (std::abs(c0) < 1e-300) throw std::domain_error("Jet::inverse: vanishing constant term");
        Jet u = *this;
        u.c[0] = 0;
        u = u.scaled(1.0 / c0); // f = c0 (1 + u)
        Jet r = Jet::constant(s, 1.0), upow = Jet::constant(s, 1.0);
        for (int p = 1; p <= s.order; ++p) {
            upow = upow * u;
            r += upow.scaled((p % 2) ? -1.0 : 1.0);
        }
        return r.scaled(1.0 / c0);
    }

    Jet pow(int e) const {
        if (e < 0) return inverse().pow(-e);
        Jet r = Jet::constant(*space, 1.0), b = *this;
        while (e > 0) {
            if (e & 1) r = r * b;
            b = b * b;
            e >>= 1;
        }
        return r;
    }

    Jet exp() const {
        const JetSpace& s = *space;
        Jet u = *this;
        std::complex<double> c0 = u.c[0];
        u.c[0] = 0;
        Jet r = Jet::constant(s, 1.0), upow = Jet::constant(s, 1.0);
        double fact = 1;
        for (int p = 1; p <= s.order; ++p) {
            upow = upow * u;
            fact *= p;
            r += upow.scaled(1.0 / fact);
        }
        return r.scaled(std::exp(c0));
    }

    /// partial derivative value d^mu f at the expansion point
    std::complex<double> partial(const MultiIndex& mu) const {
        auto it = space->pos.find(mu);
        if (it == space->pos.end()) throw std::out_of_range("Jet::partial: order exceeds jet order");
        return c[it->second] * to_double(Rational(mi_factorial(mu)));
    }
};

/// Closed-form symbol given by an expression tree over
/// {constants, x_i, xi_i, +, *, integer powers, exp}, with all mixed partials
/// up to a requested order obtained by jet propagation. A complex scalar
/// prefactor keeps the representation closed under D-derivatives.
class ExprSymbol {
public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;
    struct Node {
        enum class Kind { constant, var_x, var_xi, add, mul, pow, exp_fn, neg };
        Kind kind;
        double value = 0; // constant
        int axis = 0;     // var_*
        int expo = 1;     // pow
        std::vector<NodePtr> kids;
    };

    ExprSymbol() = default;
    ExprSymbol(int dim, NodePtr root, std::complex<double> prefactor = 1.0)
        : dim_(dim), root_(std::move(root)), prefactor_(prefactor) {}

    static ExprSymbol parse(int dim, const std::string& text);

    int dim() const { return dim_; }
    const std::string& source() const { return source_; }
    std::complex<double> prefactor() const { return prefactor_; }
    ExprSymbol with_prefactor(std::complex<double> pf) const {
        ExprSymbol r = *this;
        r.prefactor_ = pf;
        return r;
    }

    std::complex<double> eval(std::span<const double> xs, std::span<const double> xis) const {
        check_point(xs, xis);
        return prefactor_ * eval_node(*root_, xs, xis);
    }

    /// Jet of all mixed partials up to `order` at (xs, xis); order <= 12.
    Jet jet(std::span<const double> xs, std::span<const double> xis, int order) const {
        check_point(xs, xis);
        if (order > 12) throw std::invalid_argument("ExprSymbol::jet: order capped at 12");
        const JetSpace& s = JetSpace::get(2 * dim_, order);
        return jet_node(*root_, s, xs, xis).scaled(prefactor_);
    }

    /// d^mu_x d^nu_xi at a point, |mu + nu| <= order of the supplied jet
    static std::complex<double> partial(const Jet& j, const MultiIndex& mu, const MultiIndex& nu) {
        MultiIndex full(mu);
        full.insert(full.end(), nu.begin(), nu.end());
        return j.partial(full);
    }

    /// Symbolic partial derivative (one step along an axis of x or xi).
    ExprSymbol derive_step(bool wrt_xi, int axis) const {
        return ExprSymbol(dim_, derive_node(root_, wrt_xi, axis), prefactor_);
    }
    /// D = (-i)^{steps} partial
    ExprSymbol derive(const MultiIndex& dx, const MultiIndex& dxi, bool d_convention) const {
        ExprSymbol r = *this;
        for (int i = 0; i < dim_; ++i) {
            for (int k = 0; k < dx[i]; ++k) r = r.derive_step(false, i);
            for (int k = 0; k < dxi[i]; ++k) r = r.derive_step(true, i);
        }
        if (d_convention) {
            int steps = mi_abs(dx) + mi_abs(dxi);
            std::complex<double> mi(0, -1), f = 1;
            for (int k = 0; k < steps; ++k) f *= mi;
            r.prefactor_ *= f;
        }
        return r;
    }

    std::string to_string() const;

private:
    void check_point(std::span<const double> xs, std::span<const double> xis) const {
        if (static_cast<int>(xs.size()) != dim_ || static_cast<int>(xis.size()) != dim_)
            throw std::invalid_argument("ExprSymbol: point dimension mismatch");
        if (!root_) throw std::logic_error("ExprSymbol: empty expression");
    }

    static std::complex<double> eval_node(const Node& n, std::span<const double> xs,
                                          std::span<const double> xis) {
        using K = Node::Kind;
        switch (n.kind) {
            case K::constant: return n.value;
            case K::var_x: return xs[n.axis];
            case K::var_xi: return xis[n.axis];
            case K::add: {
                std::complex<double> s = 0;
                for (const auto& k : n.kids) s += eval_node(*k, xs, xis);
                return s;
            }
            case K::mul: {
                std::complex<double> s = 1;
                for (const auto& k : n.kids) s *= eval_node(*k, xs, xis);
                return s;
            }
            case K::pow: {
                std::complex<double> b = eval_node(*n.kids[0], xs, xis);
                return std::pow(b, n.expo);
            }
            case K::exp_fn: return std::exp(eval_node(*n.kids[0], xs, xis));
            case K::neg: return -eval_node(*n.kids[0], xs, xis);
        }
        throw std::logic_error("ExprSymbol: bad node");
    }

    Jet jet_node(const Node& n, const JetSpace& s, std::span<const double> xs,
                 std::span<const double> xis) const {
        using K = Node::Kind;
        switch (n.kind) {
            case K::constant: return Jet::constant(s, n.value);
            case K::var_x: return Jet::variable(s, n.axis, xs[n.axis]);
            case K::var_xi: return Jet::variable(s, dim_ + n.axis, xis[n.axis]);
            case K::add: {
                Jet r(s);
                for (const auto& k : n.kids) r += jet_node(*k, s, xs, xis);
                return r;
            }
            case K::mul: {
                Jet r = Jet::constant(s, 1.0);
                for (const auto& k : n.kids) r = r * jet_node(*k, s, xs, xis);
                return r;
            }
            case K::pow: return jet_node(*n.kids[0], s, xs, xis).pow(n.expo);
            case K::exp_fn: return jet_node(*n.kids[0], s, xs, xis).exp();
            case K::neg: return -jet_node(*n.kids[0], s, xs, xis);
        }
        throw std::logic_error("ExprSymbol: bad node");
    }

    static NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

    static NodePtr derive_node(const NodePtr& n, bool wrt_xi, int axis) {
        using K = Node::Kind;
        switch (n->kind) {
            case K::constant: return make({K::constant, 0.0, 0, 1, {}});
            case K::var_x:
                return make({K::constant, (!wrt_xi && n->axis == axis) ? 1.0 : 0.0, 0, 1, {}});
            case K::var_xi:
                return make({K::constant, (wrt_xi && n->axis == axis) ? 1.0 : 0.0, 0, 1, {}});
            case K::add: {
                Node r{K::add, 0, 0, 1, {}};
                for (const auto& k : n->kids) r.kids.push_back(derive_node(k, wrt_xi, axis));
                return make(std::move(r));
            }
            case K::mul: {
                Node sum{K::add, 0, 0, 1, {}};
                for (size_t i = 0; i < n->kids.size(); ++i) {
                    Node prod{K::mul, 0, 0, 1, {}};
                    for (size_t j = 0; j < n->kids.size(); ++j)
                        prod.kids.push_back(j == i ? derive_node(n->kids[j], wrt_xi, axis) : n->kids[j]);
                    sum.kids.push_back(make(std::move(prod)));
                }
                return make(std::move(sum));
            }
            case K::pow: {
                // (f^e)' = e f^{e-1} f'
                Node prod{K::mul, 0, 0, 1, {}};
                prod.kids.push_back(make({K::constant, static_cast<double>(n->expo), 0, 1, {}}));
                prod.kids.push_back(make({K::pow, 0, 0, n->expo - 1, {n->kids[0]}}));
                prod.kids.push_back(derive_node(n->kids[0], wrt_xi, axis));
                return make(std::move(prod));
            }
            case K::exp_fn: {
                Node prod{K::mul, 0, 0, 1, {}};
                prod.kids.push_back(n);
                prod.kids.push_back(derive_node(n->kids[0], wrt_xi, axis));
                return make(std::move(prod));
            }
            case K::neg: {
                Node r{K::neg, 0, 0, 1, {derive_node(n->kids[0], wrt_xi, axis)}};
                return make(std::move(r));
            }
        }
        throw std::logic_error("ExprSymbol: bad node");
    }

    static void render(const Node& n, std::string& out);

    int dim_ = 1;
    NodePtr root_;
    std::complex<double> prefactor_ = 1.0;
    std::string source_;
};

// ---------------------------------------------------------------------------
// Parser: expr := term (('+'|'-') term)*, term := unary ('*' unary)*,
// unary := '-' unary | primary ['^' int], primary := number | var | exp(...) | (...)
// Anything outside the supported node set is rejected here.
// ---------------------------------------------------------------------------

namespace detail {
struct ExprParser {
    const std::string& s;
    size_t pos = 0;
    int dim;

    explicit ExprParser(const std::string& text, int d) : s(text), dim(d) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw std::invalid_argument("expression parse error at offset " + std::to_string(pos) + ": " + why);
    }

    ExprSymbol::NodePtr expr() {
        auto lhs = term();
        while (true) {
            skip();
            if (eat('+')) {
                ExprSymbol::Node n{ExprSymbol::Node::Kind::add, 0, 0, 1, {lhs, term()}};
                lhs = std::make_shared<const ExprSymbol::Node>(std::move(n));
            } else if (eat('-')) {
                ExprSymbol::Node neg{ExprSymbol::Node::Kind::neg, 0, 0, 1, {term()}};
                ExprSymbol::Node n{ExprSymbol::Node::Kind::add, 0, 0, 1,
                                   {lhs, std::make_shared<const ExprSymbol::Node>(std::move(neg))}};
                lhs = std::make_shared<const ExprSymbol::Node>(std::move(n));
            } else {
                return lhs;
            }
        }
    }

    ExprSymbol::NodePtr term() {
        auto lhs = unary();
        while (true) {
            skip();
            if (eat('*')) {
                ExprSymbol::Node n{ExprSymbol::Node::Kind::mul, 0, 0, 1, {lhs, unary()}};
                lhs = std::make_shared<const ExprSymbol::Node>(std::move(n));
            } else {
                return lhs;
            }
        }
    }

    ExprSymbol::NodePtr unary() {
        skip();
        if (eat('-')) {
            ExprSymbol::Node n{ExprSymbol::Node::Kind::neg, 0, 0, 1, {unary()}};
            return std::make_shared<const ExprSymbol::Node>(std::move(n));
        }
        auto base = primary();
        skip();
        if (eat('^')) {
            skip();
            bool negexp = eat('-');
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) fail("expected integer exponent after '^'");
            int e = std::stoi(s.substr(start, pos - start));
            ExprSymbol::Node n{ExprSymbol::Node::Kind::pow, 0, 0, negexp ? -e : e, {base}};
            return std::make_shared<const ExprSymbol::Node>(std::move(n));
        }
        return base;
    }

    ExprSymbol::NodePtr primary() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t start = pos;
            while (pos < s.size() &&
                   (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' || s[pos] == 'e' ||
                    s[pos] == 'E' || ((s[pos] == '+' || s[pos] == '-') && (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
                ++pos;
            double v = std::stod(s.substr(start, pos - start));
            return std::make_shared<const ExprSymbol::Node>(
                ExprSymbol::Node{ExprSymbol::Node::Kind::constant, v, 0, 1, {}});
        }
        if (c == '(') {
            ++pos;
            auto inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos;
            while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "exp") {
                if (!eat('(')) fail("expected '(' after exp");
                auto inner = expr();
                if (!eat(')')) fail("expected ')'");
                return std::make_shared<const ExprSymbol::Node>(
                    ExprSymbol::Node{ExprSymbol::Node::Kind::exp_fn, 0, 0, 1, {inner}});
            }
            if (name == "x" || name == "xi") {
                int axis = 0;
                size_t dstart = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
                if (pos > dstart)
                    axis = std::stoi(s.substr(dstart, pos - dstart)) - 1;
                else if (dim != 1)
                    fail("variable '" + name + "' needs an axis index when dim > 1");
                if (axis < 0 || axis >= dim) fail("axis out of range for '" + name + "'");
                auto kind = name == "x" ? ExprSymbol::Node::Kind::var_x : ExprSymbol::Node::Kind::var_xi;
                return std::make_shared<const ExprSymbol::Node>(ExprSymbol::Node{kind, 0, axis, 1, {}});
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};
} // namespace detail

inline ExprSymbol ExprSymbol::parse(int dim, const std::string& text) {
    detail::ExprParser p(text, dim);
    auto root = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    ExprSymbol sym(dim, std::move(root));
    sym.source_ = text;
    return sym;
}

inline void ExprSymbol::render(const Node& n, std::string& out) {
    using K = Node::Kind;
    switch (n.kind) {
        case K::constant: {
            std::ostringstream os;
            os.precision(17);
            os << n.value;
            out += os.str();
            return;
        }
        case K::var_x: out += "x" + std::to_string(n.axis + 1); return;
        case K::var_xi: out += "xi" + std::to_string(n.axis + 1); return;
        case K::add: {
            out += "(";
            for (size_t i = 0; i < n.kids.size(); ++i) {
                if (i) out += "+";
                render(*n.kids[i], out);
            }
            out += ")";
            return;
        }
        case K::mul: {
            out += "(";
            for (size_t i = 0; i < n.kids.size(); ++i) {
                if (i) out += "*";
                render(*n.kids[i], out);
            }
            out += ")";
            return;
        }
        case K::pow: {
            out += "(";
            render(*n.kids[0], out);
            out += ")^" + (n.expo < 0 ? "-" + std::to_string(-n.expo) : std::to_string(n.expo));
            return;
        }
        case K::exp_fn:
            out += "exp(";
            render(*n.kids[0], out);
            out += ")";
            return;
        case K::neg:
            out += "(-";
            render(*n.kids[0], out);
            out += ")";
            return;
    }
}

inline std::string ExprSymbol::to_string() const {
    if (!source_.empty() && prefactor_ == std::complex<double>(1.0)) return source_;
    std::string out;
    render(*root_, out);
    return out;
}

} // namespace psdo

#endif
