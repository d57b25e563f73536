#pragma once

#include <vector>

#include "ksdiff/kilbas_saigo.hpp"
#include "ksdiff/special.hpp"

namespace ksdiff {

/// Order (alpha, gamma) of D^(alpha,gamma) f = t^-gamma * Caputo_alpha f.
/// alpha = 1 is accepted as the classical first derivative.
struct StretchedOrder {
    double alpha = 0.5;
    double gamma = 0.0;

    double beta() const { return alpha + gamma; }
    /// Parameters (a, m, l) = (alpha, 1 + gamma/alpha, gamma/alpha) of the eigenfunction.
    KSParams ks() const { return {alpha, 1.0 + gamma / alpha, gamma / alpha}; }
    /// Checks 0 < alpha <= 1, gamma >= 0; with `solver` also alpha + gamma <= 1.
    void validate(bool solver = false) const;
};

struct PowerRule {
    double coeff = 0.0;
    double exponent = 0.0;
};

/// D^(alpha,gamma) t^beta = coeff * t^exponent.
PowerRule power_rule(double beta, const StretchedOrder& ord);

/// [n] = Gamma((alpha+gamma) n + 1) / Gamma((alpha+gamma) n - alpha + 1).
double bracket(int n, const StretchedOrder& ord);
double log_bracket_factorial(int n, const StretchedOrder& ord);
/// [n!] = [1][2]...[n], [0!] = 1.
double bracket_factorial(int n, const StretchedOrder& ord);

enum class OriginRule {
    Zero,         // output 0 at t = 0
    Extrapolate,  // quadratic extrapolation from the first three positive nodes
    Value,        // caller-supplied value
};

struct CaputoOptions {
    OriginRule origin = OriginRule::Zero;
    double origin_value = 0.0;
    /// Requested accuracy for the coarse-grid warning; <= 0 disables the check.
    double tol = 0.0;
};

struct CaputoResult {
    std::vector<double> values;
    /// max |D_h - D_2h| / (2^(2-alpha) - 1) over the shared nodes t >= t_min.
    double est_error = 0.0;
    bool coarse_warning = false;
};

/// L1 discretization of D^(alpha,gamma) for samples f(t_j), t_j = j T/(n-1).
CaputoResult apply_stretched_caputo(const std::vector<double>& samples, double T, const StretchedOrder& ord,
                                    const CaputoOptions& opt = {});

/// E_{alpha,1+gamma/alpha,gamma/alpha}(-kappa t^(alpha+gamma)).
double first_order_solution(double kappa, const StretchedOrder& ord, double t, double tol = 1e-12);

/// U_n(-a,-b) by the binomial sum; U_0 = 0.
double fibonacci_U(int n, double a, double b);
/// ((a*)^n - (b*)^n) / (a* - b*) with the roots of x^2 + a x + b.
Complex fibonacci_U_closed(int n, double a, double b);

/// A (D)^2 f + B D f + lambda f = 0.
struct TelegraphCoeffs {
    double A = 1.0;
    double B = 0.0;
    double lambda = 1.0;

    double a() const { return B / A; }
    double b() const { return lambda / A; }
    void validate() const;
};

struct RootsAndWeights {
    Complex a_star;
    Complex b_star;
    Complex K1;
    Complex K2;
    bool conjugate = false;  // discriminant < 0
};

/// Roots of x^2 + a x + b and the weights for f(0) = 1, D f(0) = 1.
RootsAndWeights telegraph_roots(const TelegraphCoeffs& c);

/// kappa = lambda / B of the first-order problem left when A = 0.
double reduce_to_first_order(const TelegraphCoeffs& c);

/// K1 E(a* t^beta) + K2 E(b* t^beta) with both terms evaluated.
Complex second_order_solution_complex(const TelegraphCoeffs& c, const StretchedOrder& ord, double t,
                                      double tol = 1e-12);
/// Real solution; 2 Re(K1 E(a* t^beta)) for conjugate roots.
double second_order_solution(const TelegraphCoeffs& c, const StretchedOrder& ord, double t, double tol = 1e-12);

}  // namespace ksdiff
