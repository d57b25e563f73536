#pragma once

#include <complex>

namespace ksdiff::detail {

/// sum_{n<n_terms} c_n z^n for E_{a,m,l} carried out in MPFR with `bits`
/// of working precision.
std::complex<double> ks_series_mpfr(std::complex<double> z, double a, double m, double l, int n_terms, int bits);

}  // namespace ksdiff::detail
