#ifndef PSDO_MULTIINDEX_HPP
#define PSDO_MULTIINDEX_HPP

#include "psdo/rational.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace psdo {

using MultiIndex = std::vector<int>;

inline int mi_abs(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

inline bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mi_leq: dimension mismatch");
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mi_add: dimension mismatch");
    MultiIndex r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline MultiIndex mi_sub(const MultiIndex& a, const MultiIndex& b) {
    if (!mi_leq(b, a)) throw std::domain_error("mi_sub: result would be negative");
    MultiIndex r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline BigInt factorial(int n) {
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline BigInt mi_factorial(const MultiIndex& a) {
    BigInt f = 1;
    for (int ai : a) f *= factorial(ai);
    return f;
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt b = 1;
    for (int i = 0; i < k; ++i) {
        b *= (n - i);
        b /= (i + 1);
    }
    return b;
}

inline BigInt mi_binomial(const MultiIndex& a, const MultiIndex& b) {
    if (!mi_leq(b, a)) throw std::domain_error("mi_binomial: lower index not componentwise <= upper");
    BigInt r = 1;
    for (size_t i = 0; i < a.size(); ++i) r *= binomial(a[i], b[i]);
    return r;
}

// a! / (parts[0]! ... parts[r-1]!) with sum(parts) == a
inline BigInt mi_multinomial(const MultiIndex& a, const std::vector<MultiIndex>& parts) {
    MultiIndex sum(a.size(), 0);
    BigInt denom = 1;
    for (const auto& p : parts) {
        sum = mi_add(sum, p);
        denom *= mi_factorial(p);
    }
    if (sum != a) throw std::domain_error("mi_multinomial: parts do not sum to index");
    return mi_factorial(a) / denom;
}

namespace detail {
inline void enum_exact(int d, int total, MultiIndex& cur, int pos, std::vector<MultiIndex>& out) {
    if (pos == d - 1) {
        cur[pos] = total;
        out.push_back(cur);
        return;
    }
    for (int k = total; k >= 0; --k) {
        cur[pos] = k;
        enum_exact(d, total - k, cur, pos + 1, out);
    }
}
} // namespace detail

/// All multi-indices of length exactly `total`, lex-descending within the grade.
inline std::vector<MultiIndex> enumerate_exact(int d, int total) {
    std::vector<MultiIndex> out;
    MultiIndex cur(d, 0);
    detail::enum_exact(d, total, cur, 0, out);
    return out;
}

/// All multi-indices with |a| <= total in graded-lex order.
inline std::vector<MultiIndex> enumerate_upto(int d, int total) {
    std::vector<MultiIndex> out;
    for (int t = 0; t <= total; ++t) {
        auto grade = enumerate_exact(d, t);
        out.insert(out.end(), grade.begin(), grade.end());
    }
    return out;
}

/// All multi-indices a with a[i] <= bound[i] componentwise.
inline std::vector<MultiIndex> enumerate_box(const MultiIndex& bound) {
    std::vector<MultiIndex> out;
    MultiIndex cur(bound.size(), 0);
    while (true) {
        out.push_back(cur);
        size_t i = 0;
        while (i < cur.size()) {
            if (cur[i] < bound[i]) {
                ++cur[i];
                break;
            }
            cur[i] = 0;
            ++i;
        }
        if (i == cur.size()) break;
    }
    return out;
}

} // namespace psdo

#endif
