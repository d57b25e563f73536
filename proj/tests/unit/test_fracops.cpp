#include <cmath>
#include <vector>

#include "doctest.h"
#include "ksdiff/errors.hpp"
#include "ksdiff/fracops.hpp"

using namespace ksdiff;

namespace {

std::vector<double> sample(double T, int n, double (*f)(double, const void*), const void* ctx) {
    std::vector<double> v(n);
    for (int j = 0; j < n; ++j) v[j] = f(T * j / (n - 1), ctx);
    return v;
}

struct EigenCtx {
    double kappa;
    StretchedOrder ord;
};

double eigen_f(double t, const void* c) {
    const auto* e = static_cast<const EigenCtx*>(c);
    return first_order_solution(e->kappa, e->ord, t);
}

double eigen_residual(const EigenCtx& e, double T, int n) {
    const auto f = sample(T, n, eigen_f, &e);
    const auto d = apply_stretched_caputo(f, T, e.ord).values;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = T * j / (n - 1);
        if (t < 0.1 * T) continue;
        worst = std::max(worst, std::abs(d[j] + e.kappa * f[j]));
    }
    return worst;
}

}  // namespace

TEST_SUITE("fracops") {
    TEST_CASE("power rule matches Gamma(b+1)/Gamma(b+1-alpha) t^(b-alpha-gamma)") {
        const StretchedOrder ord{0.4, 0.3};
        for (double b : {0.5, 1.0, 2.0, 3.7}) {
            const PowerRule r = power_rule(b, ord);
            CHECK(r.coeff == doctest::Approx(std::tgamma(b + 1.0) / std::tgamma(b + 1.0 - 0.4)).epsilon(1e-13));
            CHECK(r.exponent == doctest::Approx(b - 0.7));
        }
        CHECK(power_rule(0.0, ord).coeff == 0.0);
    }

    TEST_CASE("L1 scheme reproduces the power rule on t^2") {
        const StretchedOrder ord{0.5, 0.25};
        const double T = 1.0;
        const int n = 2001;
        std::vector<double> f(n);
        for (int j = 0; j < n; ++j) f[j] = std::pow(T * j / (n - 1), 2.0);
        const auto d = apply_stretched_caputo(f, T, ord).values;
        const PowerRule r = power_rule(2.0, ord);
        for (int j : {400, 1000, 2000}) {
            const double t = T * j / (n - 1);
            CHECK(std::abs(d[j] - r.coeff * std::pow(t, r.exponent)) < 1e-3);
        }
        CHECK(d[0] == 0.0);
    }

    TEST_CASE("bracket factorial is the product of brackets") {
        const StretchedOrder ord{0.7, 0.2};
        double prod = 1.0;
        for (int k = 1; k <= 6; ++k) {
            const double bk = std::tgamma(0.9 * k + 1.0) / std::tgamma(0.9 * k - 0.7 + 1.0);
            CHECK(bracket(k, ord) == doctest::Approx(bk).epsilon(1e-13));
            prod *= bk;
        }
        CHECK(bracket_factorial(6, ord) == doctest::Approx(prod).epsilon(1e-12));
        CHECK(bracket_factorial(0, ord) == 1.0);
    }

    TEST_CASE("first-order solution at alpha = 1/2 is exp(k^2 t) erfc(k sqrt t)") {
        const StretchedOrder ord{0.5, 0.0};
        for (double kappa : {0.4, 1.0, 3.0}) {
            for (double t : {0.0, 0.2, 1.0, 5.0}) {
                const double ref = std::exp(kappa * kappa * t) * std::erfc(kappa * std::sqrt(t));
                CHECK(first_order_solution(kappa, ord, t) == doctest::Approx(ref).epsilon(1e-11));
            }
        }
    }

    TEST_CASE("first-order solution at alpha = 1, gamma = 0 is exp(-k t)") {
        const StretchedOrder ord{1.0, 0.0};
        for (double t : {0.1, 1.0, 10.0}) CHECK(first_order_solution(0.7, ord, t) == doctest::Approx(std::exp(-0.7 * t)));
    }

    TEST_CASE("discrete operator applied to the eigenfunction converges to -kappa f") {
        for (const StretchedOrder ord : {StretchedOrder{0.5, 0.0}, StretchedOrder{0.6, 0.2}, StretchedOrder{0.8, 0.2}}) {
            const EigenCtx e{1.3, ord};
            const double e1 = eigen_residual(e, 2.0, 401);
            const double e2 = eigen_residual(e, 2.0, 801);
            const double e3 = eigen_residual(e, 2.0, 1601);
            INFO("alpha = " << ord.alpha << ", gamma = " << ord.gamma << ": " << e1 << " " << e2 << " " << e3);
            CHECK(std::log2(e2 / e3) >= 1.0);
            CHECK(e3 < e2);
            CHECK(e2 < e1);
        }
    }

    TEST_CASE("coarse-grid estimate flags an unresolved grid") {
        const EigenCtx e{1.3, StretchedOrder{0.6, 0.2}};
        const auto f = sample(2.0, 41, eigen_f, &e);
        CaputoOptions opt;
        opt.tol = 1e-8;
        const CaputoResult r = apply_stretched_caputo(f, 2.0, e.ord, opt);
        CHECK(r.est_error > 0.0);
        CHECK(r.coarse_warning);
    }

    TEST_CASE("Fibonacci polynomials: binomial sum, closed form and recurrence") {
        for (auto [a, b] : {std::pair{1.0, -1.0}, std::pair{2.0, 2.0}, std::pair{-0.5, 0.3}, std::pair{3.0, 2.0}}) {
            CHECK(fibonacci_U(0, a, b) == 0.0);
            CHECK(fibonacci_U(1, a, b) == 1.0);
            for (int n = 1; n < 15; ++n) {
                const double next = -a * fibonacci_U(n, a, b) - b * fibonacci_U(n - 1, a, b);
                CHECK(fibonacci_U(n + 1, a, b) == doctest::Approx(next).epsilon(1e-12));
                const Complex c = fibonacci_U_closed(n, a, b);
                CHECK(std::abs(c.real() - fibonacci_U(n, a, b)) <= 1e-10 * std::max(1.0, std::abs(c.real())));
                CHECK(std::abs(c.imag()) <= 1e-10 * std::max(1.0, std::abs(c.real())));
            }
        }
        // x^2 - x - 1 gives the Fibonacci numbers.
        CHECK(fibonacci_U(10, -1.0, -1.0) == 55.0);
    }

    TEST_CASE("telegraph roots and weights solve the quadratic and the initial conditions") {
        for (const TelegraphCoeffs c : {TelegraphCoeffs{1.0, 3.0, 2.0}, TelegraphCoeffs{1.0, 2.0, 2.0},
                                        TelegraphCoeffs{2.0, 1.0, 5.0}}) {
            const RootsAndWeights r = telegraph_roots(c);
            for (Complex x : {r.a_star, r.b_star}) CHECK(std::abs(x * x + c.a() * x + c.b()) < 1e-13);
            CHECK(std::abs(r.K1 + r.K2 - 1.0) < 1e-14);
            CHECK(std::abs(r.K1 * r.a_star + r.K2 * r.b_star - 1.0) < 1e-13);
            CHECK(r.conjugate == (c.a() * c.a() < 4.0 * c.b()));
        }
        const RootsAndWeights r = telegraph_roots({1.0, 2.0, 2.0});
        CHECK(std::abs(r.K1 - std::conj(r.K2)) < 1e-15);
    }

    TEST_CASE("classical limit of the second-order solution") {
        const StretchedOrder ord{1.0, 0.0};
        for (double t : {0.0, 0.3, 1.0, 2.5}) {
            // f'' + 3 f' + 2 f = 0, f(0) = f'(0) = 1
            CHECK(second_order_solution({1.0, 3.0, 2.0}, ord, t) ==
                  doctest::Approx(3.0 * std::exp(-t) - 2.0 * std::exp(-2.0 * t)).epsilon(1e-12));
            // f'' + 2 f' + 2 f = 0, f(0) = f'(0) = 1
            CHECK(second_order_solution({1.0, 2.0, 2.0}, ord, t) ==
                  doctest::Approx(std::exp(-t) * (std::cos(t) + 2.0 * std::sin(t))).epsilon(1e-12));
        }
    }

    TEST_CASE("A = 0 reduces to the first-order problem") {
        const TelegraphCoeffs c{0.0, 2.0, 3.0};
        CHECK(reduce_to_first_order(c) == 1.5);
        const StretchedOrder ord{0.6, 0.2};
        CHECK(second_order_solution(c, ord, 0.8) == doctest::Approx(first_order_solution(1.5, ord, 0.8)).epsilon(1e-12));
    }

    TEST_CASE("invalid orders, coefficients and degenerate roots raise") {
        CHECK_THROWS_AS(StretchedOrder({0.0, 0.0}).validate(), InvalidArgument);
        CHECK_THROWS_AS(StretchedOrder({0.5, -0.1}).validate(), InvalidArgument);
        CHECK_THROWS_AS(StretchedOrder({0.8, 0.4}).validate(true), InvalidArgument);
        CHECK_NOTHROW(StretchedOrder({0.8, 0.4}).validate(false));
        CHECK_THROWS_AS(TelegraphCoeffs({0.0, 0.0, 1.0}).validate(), InvalidArgument);
        CHECK_THROWS_AS(telegraph_roots({1.0, 2.0, 1.0}), DegenerateRootError);
        CHECK_THROWS_AS(apply_stretched_caputo({1.0, 2.0}, 1.0, StretchedOrder{}), InvalidArgument);
        CHECK_THROWS_AS(first_order_solution(1.0, StretchedOrder{}, -1.0), InvalidArgument);
    }
}
