#ifndef PSDO_RATIONAL_HPP
#define PSDO_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <stdexcept>
#include <string>

namespace psdo {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational rat_pow(const Rational& q, int n) {
    if (n < 0) {
        if (q == 0) throw std::domain_error("rat_pow: zero base, negative exponent");
        return Rational(1) / rat_pow(q, -n);
    }
    Rational r(1), b = q;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

// Parses "3/4", "-2", "0.25", "1e-3". Decimal strings convert exactly.
inline Rational parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("parse_rational: empty string");
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    std::string mant = s;
    int exp10 = 0;
    auto e = s.find_first_of("eE");
    if (e != std::string::npos) {
        exp10 = std::stoi(s.substr(e + 1));
        mant = s.substr(0, e);
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<int>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    if (mant.empty() || mant == "-" || mant == "+")
        throw std::invalid_argument("parse_rational: bad number '" + s + "'");
    // strip leading zeros (cpp_int would read "025" as octal)
    size_t first = mant[0] == '-' || mant[0] == '+' ? 1 : 0;
    size_t digits = mant.find_first_not_of('0', first);
    if (digits == std::string::npos) digits = mant.size() - 1;
    mant = mant.substr(0, first) + mant.substr(digits);
    Rational r{BigInt(mant)};
    Rational ten(10);
    return exp10 >= 0 ? r * rat_pow(ten, exp10) : r / rat_pow(ten, -exp10);
}

inline std::string to_string(const Rational& q) {
    return q.str();
}

/// Complex number with exact rational real and imaginary parts.
struct RatC {
    Rational re{0}, im{0};

    RatC() = default;
    RatC(Rational r) : re(std::move(r)) {}
    RatC(long r) : re(r) {}
    RatC(int r) : re(r) {}
    RatC(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static RatC i() { return RatC(Rational(0), Rational(1)); }

    bool is_zero() const { return re == 0 && im == 0; }

    RatC operator-() const { return RatC(-re, -im); }
    RatC& operator+=(const RatC& o) { re += o.re; im += o.im; return *this; }
    RatC& operator-=(const RatC& o) { re -= o.re; im -= o.im; return *this; }
    RatC& operator*=(const RatC& o) {
        Rational r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    friend RatC operator+(RatC a, const RatC& b) { return a += b; }
    friend RatC operator-(RatC a, const RatC& b) { return a -= b; }
    friend RatC operator*(RatC a, const RatC& b) { return a *= b; }
    friend bool operator==(const RatC& a, const RatC& b) { return a.re == b.re && a.im == b.im; }

    RatC& operator*=(const Rational& q) { re *= q; im *= q; return *this; }
    friend RatC operator*(RatC a, const Rational& q) { return a *= q; }
    friend RatC operator*(const Rational& q, RatC a) { return a *= q; }

    // multiply by i^k
    RatC times_i_pow(int k) const {
        switch (((k % 4) + 4) % 4) {
            case 0: return *this;
            case 1: return RatC(-im, re);
            case 2: return RatC(-re, -im);
            default: return RatC(im, -re);
        }
    }
};

inline std::complex<double> to_complex(const RatC& c) {
    return {to_double(c.re), to_double(c.im)};
}

} // namespace psdo

#endif
