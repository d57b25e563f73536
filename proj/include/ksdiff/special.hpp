#pragma once

#include <complex>

namespace ksdiff {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

/// log Gamma(z) on the standard branch: analytic continuation from the
/// positive real axis with the cut along the negative real axis.
Complex log_gamma(Complex z);
Complex digamma(Complex z);
Complex trigamma(Complex z);

double log_gamma(double x);  // x > 0
double digamma(double x);
double trigamma(double x);
/// n-th derivative of digamma, n >= 1, x > 0.
double polygamma(int n, double x);
/// Bernoulli number B_{2j}.
double bernoulli_b2n(int j);

/// True when z sits on a non-positive integer (within a few ulps).
bool is_nonpositive_integer(Complex z);

}  // namespace ksdiff
