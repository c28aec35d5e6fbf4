#ifndef PSDO_GRID_HPP
#define PSDO_GRID_HPP

#include "psdo/hermite.hpp"
#include "psdo/symbol_variant.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace psdo {

/// Uniform 1-d grid x_m = -xmax + m (2 xmax / n), m = 0..n-1; n a power of two.
struct GridSpec {
    int n = 1024;
    double xmax = 12;

    double dx() const { return 2 * xmax / n; }
    double point(int m) const { return -xmax + m * dx(); }
    double freq_step() const { return M_PI / xmax; }
    double freq(int k) const { return (k - n / 2) * freq_step(); }

    /// "n=1024,xmax=12"
    static GridSpec parse(const std::string& s) {
        GridSpec g;
        size_t pos = 0;
        while (pos < s.size()) {
            size_t eq = s.find('=', pos);
            size_t comma = s.find(',', pos);
            if (comma == std::string::npos) comma = s.size();
            if (eq == std::string::npos || eq > comma)
                throw std::invalid_argument("grid spec must look like 'n=1024,xmax=12'");
            std::string key = s.substr(pos, eq - pos);
            std::string val = s.substr(eq + 1, comma - eq - 1);
            if (key == "n")
                g.n = std::stoi(val);
            else if (key == "xmax")
                g.xmax = std::stod(val);
            else
                throw std::invalid_argument("unknown grid spec key '" + key + "'");
            pos = comma + 1;
        }
        if (g.n < 8 || (g.n & (g.n - 1)) != 0)
            throw std::invalid_argument("grid size must be a power of two >= 8");
        return g;
    }
};

struct GridFunction {
    GridSpec grid;
    std::vector<std::complex<double>> values;

    GridFunction() = default;
    explicit GridFunction(GridSpec g) : grid(g), values(g.n, 0.0) {}

    double max_abs() const {
        double m = 0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
    double norm2() const {
        double s = 0;
        for (const auto& v : values) s += std::norm(v);
        return std::sqrt(s * grid.dx());
    }
};

inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    if (a.grid.n != b.grid.n) throw std::invalid_argument("grid mismatch");
    GridFunction r(a.grid);
    for (int i = 0; i < a.grid.n; ++i) r.values[i] = a.values[i] - b.values[i];
    return r;
}

/// In-place radix-2 FFT; the length must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: length must be a power of two");
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = 2 * M_PI / static_cast<double>(len) * (inverse ? 1 : -1);
        std::complex<double> step(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1);
            for (size_t k = 0; k < len / 2; ++k) {
                auto u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= step;
            }
        }
    }
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

/// Linear convolution via zero-padded FFTs.
inline std::vector<std::complex<double>> fft_convolve(std::vector<std::complex<double>> a,
                                                      std::vector<std::complex<double>> b) {
    size_t out = a.size() + b.size() - 1, L = 1;
    while (L < out) L <<= 1;
    a.resize(L, 0.0);
    b.resize(L, 0.0);
    fft_inplace(a, false);
    fft_inplace(b, false);
    for (size_t i = 0; i < L; ++i) a[i] *= b[i];
    fft_inplace(a, true);
    a.resize(out);
    return a;
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

inline GridFunction sample_hermite(GridSpec g, int k) {
    GridFunction u(g);
    for (int m = 0; m < g.n; ++m) u.values[m] = hermite_function(k, g.point(m));
    return u;
}

inline GridFunction sample_gaussian(GridSpec g, double center, double width) {
    GridFunction u(g);
    for (int m = 0; m < g.n; ++m) {
        double t = (g.point(m) - center) / width;
        u.values[m] = std::exp(-t * t / 2);
    }
    return u;
}

inline GridFunction sample_expansion(GridSpec g, const HermiteExpansion& h) {
    if (h.dim != 1) throw std::invalid_argument("sample_expansion: d = 1 only");
    GridFunction u(g);
    for (int m = 0; m < g.n; ++m) u.values[m] = eval_expansion(h, g.point(m));
    return u;
}

/// Hermite coefficients of a Gaussian exp(-(x-c)^2 / (2 w^2)) by the exact
/// three-term recurrence
///   I_{k+1} = [ c I_k + sqrt(k/2) (w^2 - 1) I_{k-1} ] / ( sqrt((k+1)/2) (1 + w^2) ),
///   I_0 = pi^{-1/4} sqrt(2 pi w^2 / (1 + w^2)) e^{-c^2 / (2 (1 + w^2))},
/// truncated once the tail stays below the tolerance.
inline HermiteExpansion gaussian_expansion(double center, double width, double tol = 1e-14,
                                           int kmax = 400) {
    if (width <= 0) throw std::invalid_argument("gaussian_expansion: width must be positive");
    double w2 = width * width;
    HermiteExpansion out(1);
    double I0 = std::pow(M_PI, -0.25) * std::sqrt(2 * M_PI * w2 / (1 + w2)) *
                std::exp(-center * center / (2 * (1 + w2)));
    double prev = 0, cur = I0, peak = std::abs(I0);
    int quiet = 0;
    for (int k = 0; k <= kmax; ++k) {
        if (std::abs(cur) > tol * peak) out.add({k}, cur);
        peak = std::max(peak, std::abs(cur));
        double next = (center * cur + std::sqrt(k / 2.0) * (w2 - 1) * prev) /
                      (std::sqrt((k + 1) / 2.0) * (1 + w2));
        prev = cur;
        cur = next;
        quiet = std::abs(cur) <= tol * peak ? quiet + 1 : 0;
        if (quiet > 8) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// tau-quantized operator by windowed grid quadrature (d = 1)
// ---------------------------------------------------------------------------

/// Raised-cosine taper over the top `frac` of the frequency band.
inline double band_window(double xi, double ximax, double frac) {
    double edge = (1 - frac) * ximax;
    double a = std::abs(xi);
    if (a <= edge) return 1.0;
    if (a >= ximax) return 0.0;
    double t = (a - edge) / (ximax - edge);
    double c = std::cos(M_PI * t / 2);
    return c * c;
}

/// Applies the operator with tau-quantized symbol a to u on the grid:
///   (A u)(x) = (2 pi)^{-1} iint e^{i(x-y) xi} a((1-tau) x + tau y, xi) u(y) dy dxi.
/// Per frequency node the y-integral is a discrete transform of u times the
/// phase; for 2*tau integer the mixed argument lands on the half-step lattice
/// and the transform collapses to an FFT convolution (O(n^2 log n) overall).
/// Other tau fall back to direct summation, guarded to n <= 256.
inline GridFunction grid_apply_op_tau(const GenericSymbol& a, const Rational& tau,
                                      const GridFunction& u, double window_frac = 0.1) {
    if (symbol_dim(a) != 1) throw std::invalid_argument("grid_apply_op_tau: d = 1 only");
    const GridSpec g = u.grid;
    const int N = g.n;
    if ((N & (N - 1)) != 0) throw std::invalid_argument("grid_apply_op_tau: grid size must be a power of two");

    // edge-decay precondition
    double peak = u.max_abs();
    double edge = 0;
    for (int m = 0; m < 8; ++m) edge = std::max({edge, std::abs(u.values[m]), std::abs(u.values[N - 1 - m])});
    if (peak > 0 && edge > 1e-12 * peak)
        throw std::invalid_argument("grid_apply_op_tau: input does not decay to 1e-12 at the grid edges");

    const double tau_d = to_double(tau);
    const double ximax = (N / 2) * g.freq_step();
    const Rational tau2 = tau * 2;
    const bool half_lattice = boost::multiprecision::denominator(tau2) == 1;
    const long t2 = half_lattice ? boost::multiprecision::numerator(tau2).convert_to<long>() : 0;

    auto eval_a = [&](double v, double xi) {
        double xs[] = {v}, xis[] = {xi};
        return symbol_eval(a, std::span<const double>(xs, 1), std::span<const double>(xis, 1));
    };

    GridFunction out(g);
    std::vector<std::complex<double>> S(N); // S_n(m) for the current frequency node
    for (int n = 0; n < N; ++n) {
        double xi = g.freq(n);
        double W = band_window(xi, ximax, window_frac);
        if (W == 0.0) continue;

        if (half_lattice && t2 == 0) {
            // tau = 0: a(x_m, xi) * sum_j e^{-i y_j xi} u_j
            std::complex<double> uhat = 0;
            for (int j = 0; j < N; ++j)
                uhat += u.values[j] * std::exp(std::complex<double>(0, -g.point(j) * xi));
            for (int m = 0; m < N; ++m) S[m] = eval_a(g.point(m), xi) * uhat;
        } else if (half_lattice && t2 == 2) {
            // tau = 1: independent of x
            std::complex<double> c = 0;
            for (int j = 0; j < N; ++j)
                c += eval_a(g.point(j), xi) * u.values[j] * std::exp(std::complex<double>(0, -g.point(j) * xi));
            std::fill(S.begin(), S.end(), c);
        } else if (half_lattice && t2 == 1) {
            // tau = 1/2: v = (x_m + y_j)/2 on the half-step lattice, index m + j
            std::vector<std::complex<double>> A(2 * N - 1), B(N);
            for (int i = 0; i < 2 * N - 1; ++i) A[i] = eval_a(-g.xmax + i * g.dx() / 2, xi);
            for (int j = 0; j < N; ++j)
                B[N - 1 - j] = u.values[j] * std::exp(std::complex<double>(0, -g.point(j) * xi));
            auto C = fft_convolve(std::move(A), std::move(B)); // S_n(m) = C[m + N - 1]
            for (int m = 0; m < N; ++m) S[m] = C[m + N - 1];
        } else {
            if (N > 256)
                throw std::invalid_argument(
                    "grid_apply_op_tau: tau outside {0, 1/2, 1} uses direct summation; use n <= 256");
            for (int m = 0; m < N; ++m) {
                std::complex<double> s = 0;
                double xm = g.point(m);
                for (int j = 0; j < N; ++j) {
                    double yj = g.point(j);
                    s += eval_a((1 - tau_d) * xm + tau_d * yj, xi) * u.values[j] *
                         std::exp(std::complex<double>(0, -yj * xi));
                }
                S[m] = s;
            }
        }

        // quadrature in xi: out[m] += (1/N) W e^{i x_m xi} S_n(m), rotating phasor over m
        std::complex<double> phase = std::exp(std::complex<double>(0, -g.xmax * xi));
        std::complex<double> rot = std::exp(std::complex<double>(0, g.dx() * xi));
        double scale = W / N;
        for (int m = 0; m < N; ++m) {
            out.values[m] += scale * phase * S[m];
            phase *= rot;
        }
    }
    return out;
}

} // namespace psdo

#endif
