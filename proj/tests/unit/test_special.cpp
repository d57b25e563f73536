#include <cmath>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "doctest.h"
#include "ksdiff/special.hpp"

using namespace ksdiff;

TEST_SUITE("special") {
    TEST_CASE("real log gamma and polygammas agree with Boost") {
        for (double x : {0.01, 0.3, 1.0, 2.5, 7.25, 31.0, 200.5}) {
            CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
            CHECK(digamma(x) == doctest::Approx(boost::math::digamma(x)).epsilon(1e-12));
            CHECK(trigamma(x) == doctest::Approx(boost::math::trigamma(x)).epsilon(1e-12));
            for (int n : {1, 2, 3})
                CHECK(polygamma(n, x) == doctest::Approx(boost::math::polygamma(n, x)).epsilon(1e-11));
        }
    }

    TEST_CASE("Bernoulli numbers agree with Boost") {
        for (int j = 0; j <= 12; ++j)
            CHECK(bernoulli_b2n(j) == doctest::Approx(boost::math::bernoulli_b2n<double>(j)).epsilon(1e-14));
    }

    TEST_CASE("complex log gamma on the imaginary axis: |Gamma(iy)|^2 = pi / (y sinh(pi y))") {
        for (double y : {0.2, 1.0, 3.5, 12.0}) {
            const double lhs = 2.0 * log_gamma(Complex(0.0, y)).real();
            const double rhs = std::log(kPi / (y * std::sinh(kPi * y)));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }

    TEST_CASE("complex log gamma: recurrence and conjugate symmetry") {
        for (Complex z : {Complex(0.4, 0.3), Complex(-2.7, 1.1), Complex(5.0, -8.0), Complex(40.0, 25.0)}) {
            const Complex d = log_gamma(z + 1.0) - log_gamma(z) - std::log(z);
            const double k = std::round(d.imag() / (2.0 * kPi));
            CHECK(std::abs(Complex(d.real(), d.imag() - 2.0 * kPi * k)) < 1e-12);
            CHECK(std::abs(log_gamma(std::conj(z)) - std::conj(log_gamma(z))) < 1e-12);
        }
    }

    TEST_CASE("reflection formula Gamma(z) Gamma(1-z) = pi / sin(pi z)") {
        for (Complex z : {Complex(0.3, 0.7), Complex(-1.4, 0.25), Complex(2.2, -1.9)}) {
            const Complex lhs = std::exp(log_gamma(z) + log_gamma(1.0 - z));
            const Complex rhs = kPi / std::sin(kPi * z);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
        }
    }

    TEST_CASE("complex digamma and trigamma reduce to Boost on the real axis") {
        for (double x : {0.25, 1.7, 9.0}) {
            CHECK(digamma(Complex(x, 0.0)).real() == doctest::Approx(boost::math::digamma(x)).epsilon(1e-12));
            CHECK(trigamma(Complex(x, 0.0)).real() == doctest::Approx(boost::math::trigamma(x)).epsilon(1e-12));
        }
    }

    TEST_CASE("non-positive integer detection") {
        CHECK(is_nonpositive_integer(Complex(0.0, 0.0)));
        CHECK(is_nonpositive_integer(Complex(-3.0, 0.0)));
        CHECK_FALSE(is_nonpositive_integer(Complex(-3.0, 1e-3)));
        CHECK_FALSE(is_nonpositive_integer(Complex(2.0, 0.0)));
    }
}
