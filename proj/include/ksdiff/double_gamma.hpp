#pragma once

#include <vector>

#include "ksdiff/special.hpp"

namespace ksdiff {

struct DoubleGammaCfg {
    double tau = 1.0;
    int product_terms = 200;        // truncation M of the m-product
    int limit_terms = 256;          // truncation m of the C, D limits (plus Euler-Maclaurin tail)
    double stirling_threshold = 30.0;
    double tol = 1e-10;
    /// Extra 1/z^k terms appended to the Stirling form.  They are generated
    /// from the shift relation G(z+1) = Gamma(z/tau) G(z); 0 keeps the bare
    /// form with its O(1/z) remainder.
    int stirling_corrections = 8;

    void validate() const;
};

struct StirlingCoeffs {
    double a2 = 0, a1 = 0, a0 = 0;
    double b2 = 0, b1 = 0, b0 = 0;
};

/// Limit constants C(tau), D(tau) of the product representation.
double c_const(double tau, const DoubleGammaCfg& cfg = {});
double d_const(double tau, const DoubleGammaCfg& cfg = {});

/// log G(z; tau) evaluated with cfg.tau.  Product form for
/// |z| <= stirling_threshold, Stirling form beyond.
Complex log_double_gamma(Complex z, const DoubleGammaCfg& cfg);

/// Bare Stirling form (a2 z^2 + a1 z + a0) log z + b2 z^2 + b1 z + b0.
Complex stirling_log_G(Complex z, double tau);

/// log[G(z+k; tau) / G(z; tau)] = sum_{j<k} log Gamma((z+j)/tau).
Complex double_gamma_ratio_shift(Complex z, int k, double tau);

/// Precomputed evaluator for a fixed tau.  Construction does the expensive
/// work (limit constants, product tables, tail coefficients, b0); every
/// evaluation afterwards is read-only, so one instance can be shared across
/// threads.
class DoubleGamma {
public:
    explicit DoubleGamma(const DoubleGammaCfg& cfg);

    Complex log_g(Complex z) const;
    Complex log_g_product(Complex z) const;
    /// Stirling form plus cfg.stirling_corrections correction terms.
    Complex log_g_stirling(Complex z) const;
    Complex log_g_stirling_bare(Complex z) const;

    double tau() const { return cfg_.tau; }
    const DoubleGammaCfg& cfg() const { return cfg_; }
    const StirlingCoeffs& stirling() const { return sc_; }
    double a_tilde() const { return a_tilde_; }
    double b_tilde() const { return b_tilde_; }
    double c() const { return c_; }
    double d() const { return d_; }
    /// Coefficients d_k of sum_k d_k z^{-k} appended to the Stirling form.
    const std::vector<double>& stirling_tail() const { return corr_; }

private:
    DoubleGamma(const DoubleGammaCfg& cfg, bool with_stirling);

    struct Tables {
        int M = 0;
        std::vector<double> lg, psi, psi1;  // index m = 1..M
        std::vector<double> tail;           // coefficient of z^k, k = 3..
    };

    Tables build_tables(int M) const;
    Complex product_with(const Tables& t, Complex z) const;
    bool is_zero_of_g(Complex z) const;

    DoubleGammaCfg cfg_;
    double c_ = 0, d_ = 0, a_tilde_ = 0, b_tilde_ = 0;
    Tables tab_;
    StirlingCoeffs sc_;
    std::vector<double> corr_;
};

StirlingCoeffs stirling_coeffs(double tau, const DoubleGammaCfg& cfg = {});

}  // namespace ksdiff
