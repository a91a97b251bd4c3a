#include "oam/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "oam/errors.hpp"

namespace oam {

using cplx = std::complex<double>;

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

#if defined(__SIZEOF_FLOAT128__)
using wide = __float128;
#else
using wide = long double;
#endif

// Minimal complex arithmetic in the wide type; std::complex<__float128> is
// not portable.
struct WideComplex {
    wide re = 0, im = 0;
};

WideComplex widen(cplx z) { return {static_cast<wide>(z.real()), static_cast<wide>(z.imag())}; }
cplx narrow(WideComplex z) { return {static_cast<double>(z.re), static_cast<double>(z.im)}; }

WideComplex operator+(WideComplex a, WideComplex b) { return {a.re + b.re, a.im + b.im}; }
WideComplex operator*(WideComplex a, WideComplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
WideComplex operator/(WideComplex a, WideComplex b) {
    const wide d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
wide norm(WideComplex a) { return a.re * a.re + a.im * a.im; }

constexpr double kSeriesRadius = 35.0;
constexpr int kMaxSeriesTerms = 500;
constexpr int kMaxAsymptoticTerms = 200;

cplx power_series(cplx a, cplx b, cplx x) {
    const WideComplex wa = widen(a), wb = widen(b), wx = widen(x);
    WideComplex term{1, 0}, sum{1, 0};
    const wide tol2 = static_cast<wide>(1e-32);  // (1e-16)^2, compared on squared moduli
    for (int k = 0; k < kMaxSeriesTerms; ++k) {
        const WideComplex kk{static_cast<wide>(k), 0};
        const WideComplex k1{static_cast<wide>(k + 1), 0};
        term = term * (wa + kk) * wx / ((wb + kk) * k1);
        sum = sum + term;
        if (norm(term) < tol2 * norm(sum)) return narrow(sum);
    }
    throw NumericError("kummer_1f1: power series did not converge in 500 terms");
}

// Sum of p_s / (s! y^s) with p_s = (c)_s (d)_s, truncated at its smallest term.
cplx asymptotic_sum(cplx c, cplx d, cplx y) {
    cplx sum = 0.0, term = 1.0;
    double prev = std::abs(term);
    // Terms may grow for s < |c| + |d| before the divergent tail starts.
    const double transient = std::abs(c) + std::abs(d);
    for (int s = 0; s < kMaxAsymptoticTerms; ++s) {
        sum += term;
        const cplx next = term * (c + double(s)) * (d + double(s)) / (double(s + 1) * y);
        const double mag = std::abs(next);
        if (mag == 0.0 || mag < 1e-17 * std::abs(sum)) return sum + next;
        if (mag > prev && s >= transient) break;
        prev = mag;
        term = next;
    }
    return sum;
}

cplx asymptotic(cplx a, cplx b, cplx x) {
    const cplx gb = std::exp(log_gamma(b));
    cplx out = 0.0;
    const cplx ra = reciprocal_gamma(a);
    if (ra != 0.0)
        out += gb * ra * std::exp(x) * std::pow(x, a - b) * asymptotic_sum(1.0 - a, b - a, x);
    const cplx rba = reciprocal_gamma(b - a);
    if (rba != 0.0)
        out += gb * rba * std::pow(-x, -a) * asymptotic_sum(a, a - b + 1.0, -x);
    return out;
}

}  // namespace

cplx log_gamma(cplx z) {
    if (z.real() < 0.5) {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        return std::log(std::numbers::pi) - std::log(std::sin(std::numbers::pi * z)) -
               log_gamma(1.0 - z);
    }
    z -= 1.0;
    cplx acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) acc += kLanczos[i] / (z + double(i));
    const cplx t = z + kLanczosG + 0.5;
    return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(acc);
}

double log_gamma(double x) {
    require(std::isfinite(x) && x > 0.0, "log_gamma: argument must be positive");
    if (x < 0.5) {
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) acc += kLanczos[i] / (z + double(i));
    const double t = z + kLanczosG + 0.5;
    return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(acc);
}

cplx reciprocal_gamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

cplx kummer_1f1(cplx a, cplx b, cplx x) {
    require(!is_nonpositive_integer(b), "kummer_1f1: b must not be a nonpositive integer");
    if (x == 0.0) return 1.0;

    cplx out;
    if (std::abs(x) <= kSeriesRadius) {
        out = x.real() < 0.0 ? std::exp(x) * power_series(b - a, b, -x) : power_series(a, b, x);
    } else {
        out = asymptotic(a, b, x);
    }
    if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
        throw NumericError("kummer_1f1: result is not finite");
    return out;
}

}  // namespace oam
