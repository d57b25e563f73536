#include <cmath>
#include <vector>

#include "doctest.h"
#include "ksdiff/errors.hpp"
#include "ksdiff/pearson_spectral.hpp"
#include "oracle.hpp"

using namespace ksdiff;

namespace {

PearsonModel model_from(const std::string& kind, const nlohmann::json& row) {
    if (kind == "ou") return PearsonModel::ou(row["theta"], row["mu"], row["sigma2"]);
    if (kind == "cir") return PearsonModel::cir(row["theta"], row["a"], row["b"]);
    return PearsonModel::jacobi(row["theta"], row["a"], row["b"]);
}

}  // namespace

TEST_SUITE("pearson_spectral") {
    TEST_CASE("orthonormal polynomials and stationary densities match scipy") {
        const auto fx = oracle::load("pearson.json");
        for (const std::string kind : {"ou", "cir", "jacobi"}) {
            for (const auto& row : fx[kind]) {
                const PearsonModel m = model_from(kind, row);
                const double x = row["x"];
                const auto q = orthonormal_polys(m, 12, x);
                INFO(kind << " at x = " << x);
                for (int n = 0; n < 12; ++n) {
                    const double ref = row["q"][n];
                    CHECK(std::abs(q[n] - ref) <= 1e-11 * std::max(1.0, std::abs(ref)));
                }
                CHECK(stationary_density(m, x) == doctest::Approx(row["density"].get<double>()).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("eigenvalues") {
        CHECK(eigenvalue(PearsonModel::ou(1.5, 0.0, 1.0), 4) == doctest::Approx(6.0));
        CHECK(eigenvalue(PearsonModel::cir(0.7, 2.0, 3.0), 3) == doctest::Approx(2.1));
        CHECK(eigenvalue(PearsonModel::jacobi(2.0, 1.0, 2.0), 3) == doctest::Approx(2.0 * 3 * 7 / 5.0));
        CHECK(eigenvalue(PearsonModel::ou(1.5, 0.0, 1.0), 0) == 0.0);
    }

    TEST_CASE("Gauss rule integrates products of orthonormal polynomials exactly") {
        for (const PearsonModel m : {PearsonModel::ou(1.0, 0.5, 2.0), PearsonModel::cir(1.0, 2.0, 3.0),
                                     PearsonModel::jacobi(1.0, 1.0, 2.0)}) {
            const GaussRule& g = gauss_rule(m, 30);
            double wsum = 0.0;
            for (double w : g.weights) wsum += w;
            CHECK(wsum == doctest::Approx(1.0).epsilon(1e-13));
            for (int n = 0; n < 8; ++n) {
                for (int k = 0; k <= n; ++k) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < g.nodes.size(); ++i)
                        s += g.weights[i] * orthonormal_poly(m, n, g.nodes[i]) * orthonormal_poly(m, k, g.nodes[i]);
                    CHECK(std::abs(s - (n == k ? 1.0 : 0.0)) < 1e-11);
                }
            }
        }
    }

    TEST_CASE("classical CIR series matches the noncentral chi-square kernel") {
        for (const auto& row : oracle::load("pearson.json")["cir_kernel"]) {
            const PearsonModel m = PearsonModel::cir(row["theta"], row["a"], row["b"]);
            SeriesCfg cfg;
            cfg.N = 150;
            cfg.N_max = 400;
            cfg.tol = 1e-10;
            const double x = row["x"], t = row["t"], y = row["y"];
            const SeriesValue v = transition_density_classical(m, x, t, y, cfg);
            INFO("t = " << t << ", y = " << y << ", x = " << x);
            CHECK(v.value == doctest::Approx(row["density"].get<double>()).epsilon(1e-8));
        }
    }

    TEST_CASE("classical OU series matches the Gaussian kernel") {
        const PearsonModel m = PearsonModel::ou(2.0, 0.5, 1.5);
        for (double t : {0.2, 1.0}) {
            for (double x : {-1.0, 0.5, 2.2}) {
                const double y = 1.1;
                const double mean = 0.5 + (y - 0.5) * std::exp(-2.0 * t);
                const double var = 1.5 * (1.0 - std::exp(-4.0 * t));
                const double ref = std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * kPi * var);
                CHECK(ou_transition_density_exact(m, x, t, y) == doctest::Approx(ref).epsilon(1e-14));
                CHECK(transition_density_classical(m, x, t, y).value == doctest::Approx(ref).epsilon(1e-8));
            }
        }
    }

    TEST_CASE("stretched kernel with alpha = 1/2 uses the erfc temporal factor") {
        const PearsonModel m = PearsonModel::ou(1.0, 0.0, 1.0);
        const StretchedOrder ord{0.5, 0.0};
        const double t = 0.8, y = 0.4;
        for (double x : {-1.5, 0.0, 1.2}) {
            const auto qx = orthonormal_polys(m, 60, x);
            const auto qy = orthonormal_polys(m, 60, y);
            double s = 0.0;
            for (int n = 0; n < 60; ++n) {
                const double lam = n;
                s += oracle::erfcx(lam * std::sqrt(t)) * qx[n] * qy[n];
            }
            const double ref = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi) * s;
            SeriesCfg cfg;
            cfg.N = 60;
            cfg.auto_increase = false;
            CHECK(transition_density_stretched(m, ord, x, t, y, cfg).value == doctest::Approx(ref).epsilon(1e-9));
        }
    }

    TEST_CASE("alpha = 1, gamma = 0 stretched kernel equals the classical kernel") {
        const PearsonModel m = PearsonModel::jacobi(1.0, 1.0, 2.0);
        for (double x : {-0.6, 0.1, 0.7}) {
            const double c = transition_density_classical(m, x, 0.5, 0.2).value;
            CHECK(transition_density_stretched(m, {1.0, 0.0}, x, 0.5, 0.2).value == doctest::Approx(c).epsilon(1e-10));
        }
    }

    TEST_CASE("stretched transition densities carry unit mass") {
        const StretchedOrder ord{0.6, 0.2};
        SeriesCfg cfg;
        cfg.N = 150;
        cfg.auto_increase = false;
        struct Case {
            PearsonModel model;
            double lo, hi;
        };
        for (const Case& c : {Case{PearsonModel::ou(1.0, 0.0, 1.0), -9.0, 9.0},
                              Case{PearsonModel::jacobi(1.0, 1.0, 2.0), -1.0, 1.0}}) {
            const auto [xs, ws] = oracle::gauss_legendre(c.lo, c.hi, 12);
            const SeriesGrid g = transition_density_grid(c.model, stretched_modes(c.model, ord, 1.0), xs, 0.3, cfg);
            double mass = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) mass += ws[i] * g.values[i];
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        }
    }

    TEST_CASE("projection of a single mode and backward solution") {
        const PearsonModel m = PearsonModel::cir(1.0, 2.0, 3.0);
        const StretchedOrder ord{0.7, 0.1};
        const auto h = [&](double x) { return orthonormal_poly(m, 2, x) + 0.5; };
        const SpectralCoeffs c = project_initial(m, h, 8, CoeffKind::Backward);
        for (int n = 0; n < 8; ++n) CHECK(std::abs(c.values[n] - (n == 2 ? 1.0 : n == 0 ? 0.5 : 0.0)) < 1e-12);
        CHECK(c.parseval == doctest::Approx(1.25));
        CHECK(c.reconstruction_error < 1e-10);
        const double t = 1.4, y = 0.9;
        const double ref = 0.5 + first_order_solution(eigenvalue(m, 2), ord, t) * orthonormal_poly(m, 2, y);
        CHECK(solve_backward_stretched(m, ord, c, t, y) == doctest::Approx(ref).epsilon(1e-11));
    }

    TEST_CASE("hyperbolic temporal factors solve the telegraph problem mode by mode") {
        const PearsonModel m = PearsonModel::ou(2.0, 0.0, 1.0);
        const StretchedOrder ord{0.6, 0.2};
        CHECK(hyperbolic_temporal_factor(m, ord, 1.0, 2.0, 0, 0.7) == 1.0);
        for (int n : {1, 3, 5}) {
            const TelegraphCoeffs tc{1.0, 2.0, eigenvalue(m, n)};
            CHECK(hyperbolic_temporal_factor(m, ord, 1.0, 2.0, n, 0.7) ==
                  doctest::Approx(second_order_solution(tc, ord, 0.7)).epsilon(1e-12));
        }
        // A = 0 collapses to the first-order factor with kappa = lambda / B.
        CHECK(hyperbolic_temporal_factor(m, ord, 0.0, 2.0, 3, 0.7) ==
              doctest::Approx(first_order_solution(eigenvalue(m, 3) / 2.0, ord, 0.7)).epsilon(1e-12));
    }

    TEST_CASE("backward residual decreases under grid refinement") {
        const PearsonModel m = PearsonModel::ou(1.0, 0.0, 1.0);
        const StretchedOrder ord{0.6, 0.2};
        const SpectralCoeffs c = project_initial(m, [](double x) { return std::exp(-x * x); }, 24, CoeffKind::Backward);
        auto residual = [&](int nt) {
            SolutionGrid g;
            for (int i = 0; i < nt; ++i) g.ts.push_back(1.0 * i / (nt - 1));
            for (int j = 0; j < 41; ++j) g.xs.push_back(-2.0 + 4.0 * j / 40);
            std::vector<std::vector<double>> q;
            for (double x : g.xs) q.push_back(orthonormal_polys(m, c.N(), x));
            for (double t : g.ts) {
                std::vector<double> tn(std::size_t(c.N()));
                for (int n = 0; n < c.N(); ++n) tn[std::size_t(n)] = first_order_solution(eigenvalue(m, n), ord, t);
                std::vector<double> row;
                for (const auto& qx : q) {
                    double v = 0.0;
                    for (int n = 0; n < c.N(); ++n) v += c.values[std::size_t(n)] * tn[std::size_t(n)] * qx[std::size_t(n)];
                    row.push_back(v);
                }
                g.values.push_back(row);
            }
            ResidualOptions opt;
            opt.t_from = 0.1;
            return residual_check(g, m, ord, 0.0, 1.0, opt).sup;
        };
        const double r1 = residual(101), r2 = residual(201);
        INFO(r1 << " " << r2);
        CHECK(r2 < 0.8 * r1);
    }

    TEST_CASE("model validation") {
        CHECK_THROWS_AS(PearsonModel::ou(-1.0, 0.0, 1.0).validate(), InvalidArgument);
        CHECK_THROWS_AS(PearsonModel::cir(1.0, 0.0, 1.0).validate(), InvalidArgument);
        CHECK_THROWS_AS(PearsonModel::jacobi(1.0, -1.5, 1.0).validate(), InvalidArgument);
        CHECK(PearsonModel::cir(1.0, 2.0, 3.0).in_state_space(0.5));
        CHECK_FALSE(PearsonModel::jacobi(1.0, 1.0, 1.0).in_state_space(1.5));
    }
}
