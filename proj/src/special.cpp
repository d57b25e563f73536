#include "ksdiff/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "ksdiff/errors.hpp"

namespace ksdiff {
namespace {

constexpr int kAsymTerms = 11;
constexpr double kAsymRadius = 12.0;

struct AsymTables {
    std::array<double, kAsymTerms> lgam;  // B_{2k} / (2k (2k-1))
    std::array<double, kAsymTerms> psi;   // B_{2k} / (2k)
    std::array<double, kAsymTerms> psi1;  // B_{2k}
    AsymTables() {
        for (int k = 1; k <= kAsymTerms; ++k) {
            const double b = boost::math::bernoulli_b2n<double>(k);
            lgam[k - 1] = b / (2.0 * k * (2.0 * k - 1.0));
            psi[k - 1] = b / (2.0 * k);
            psi1[k - 1] = b;
        }
    }
};

const AsymTables& tables() {
    static const AsymTables t;
    return t;
}

void check_finite(Complex z, const char* who) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw InvalidArgument(std::string(who) + ": non-finite argument");
}

// Shift count so that w = z + n lies in the region where the asymptotic
// series are accurate to double precision.
int shift_count(Complex z) {
    int n = 0;
    while (z.real() + n < 0.0 || std::abs(z + double(n)) < kAsymRadius) {
        if (++n > 1000000) throw RangeError("gamma: argument too far in the left half-plane");
    }
    return n;
}

}  // namespace

bool is_nonpositive_integer(Complex z) {
    if (z.imag() != 0.0 || z.real() > 0.0) return false;
    const double r = z.real();
    return std::abs(r - std::round(r)) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(r));
}

Complex log_gamma(Complex z) {
    check_finite(z, "log_gamma");
    if (is_nonpositive_integer(z)) throw PoleError("log_gamma: pole at non-positive integer");
    const int n = shift_count(z);
    Complex shift = 0.0;
    for (int k = 0; k < n; ++k) shift += std::log(z + double(k));
    const Complex w = z + double(n);
    const Complex iw = 1.0 / w;
    const Complex iw2 = iw * iw;
    const auto& c = tables().lgam;
    Complex series = c[kAsymTerms - 1];
    for (int k = kAsymTerms - 2; k >= 0; --k) series = series * iw2 + c[k];
    series *= iw;
    return (w - 0.5) * std::log(w) - w + kLogSqrt2Pi + series - shift;
}

Complex digamma(Complex z) {
    check_finite(z, "digamma");
    if (is_nonpositive_integer(z)) throw PoleError("digamma: pole at non-positive integer");
    const int n = shift_count(z);
    Complex shift = 0.0;
    for (int k = 0; k < n; ++k) shift += 1.0 / (z + double(k));
    const Complex w = z + double(n);
    const Complex iw2 = 1.0 / (w * w);
    const auto& c = tables().psi;
    Complex series = c[kAsymTerms - 1];
    for (int k = kAsymTerms - 2; k >= 0; --k) series = series * iw2 + c[k];
    series *= iw2;
    return std::log(w) - 0.5 / w - series - shift;
}

Complex trigamma(Complex z) {
    check_finite(z, "trigamma");
    if (is_nonpositive_integer(z)) throw PoleError("trigamma: pole at non-positive integer");
    const int n = shift_count(z);
    Complex shift = 0.0;
    for (int k = 0; k < n; ++k) {
        const Complex u = 1.0 / (z + double(k));
        shift += u * u;
    }
    const Complex w = z + double(n);
    const Complex iw = 1.0 / w;
    const Complex iw2 = iw * iw;
    const auto& c = tables().psi1;
    Complex series = c[kAsymTerms - 1];
    for (int k = kAsymTerms - 2; k >= 0; --k) series = series * iw2 + c[k];
    series *= iw2 * iw;
    return iw + 0.5 * iw2 + series + shift;
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw InvalidArgument("log_gamma(real): argument must be positive");
    return std::lgamma(x);
}

double digamma(double x) { return boost::math::digamma(x); }
double trigamma(double x) { return boost::math::trigamma(x); }

double polygamma(int n, double x) {
    if (n < 1) throw InvalidArgument("polygamma: order must be >= 1");
    if (!(x > 0.0)) throw InvalidArgument("polygamma: argument must be positive");
    return boost::math::polygamma(n, x);
}

double bernoulli_b2n(int j) { return boost::math::bernoulli_b2n<double>(j); }

}  // namespace ksdiff
