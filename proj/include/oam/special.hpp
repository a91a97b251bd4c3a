#pragma once

#include <complex>

namespace oam {

/// ln Gamma(x) for x > 0 (Lanczos, g = 7).
double log_gamma(double x);

/// Complex ln Gamma(z) on any branch (only exp() of it is meaningful).
/// Poles are the caller's problem; see reciprocal_gamma.
std::complex<double> log_gamma(std::complex<double> z);

/// 1 / Gamma(z), exactly zero at the poles z = 0, -1, -2, ...
std::complex<double> reciprocal_gamma(std::complex<double> z);

/// Confluent hypergeometric function 1F1(a; b; x).
///
/// |x| <= 35: power series with t_{k+1} = t_k (a+k) x / ((b+k)(k+1)), summed
/// in extended precision and stopped once |t_k| < 1e-16 |sum| (at most 500
/// terms). For Re(x) < 0 the Kummer transformation
/// 1F1(a;b;x) = e^x 1F1(b-a;b;-x) is applied first, so the summed series
/// never alternates in sign of its real drift. Larger |x| uses the two-sided
/// asymptotic expansion, which is accurate to ~1e-13 beyond that radius.
///
/// Throws ValidationError when b is a nonpositive integer and NumericError on
/// nonconvergence or overflow.
std::complex<double> kummer_1f1(std::complex<double> a, std::complex<double> b,
                                std::complex<double> x);

}  // namespace oam
