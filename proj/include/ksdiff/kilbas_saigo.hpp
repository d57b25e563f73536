#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ksdiff/double_gamma.hpp"
#include "ksdiff/special.hpp"

namespace ksdiff {

/// Parameters (a, m, l) of E_{a,m,l}(z) = sum c_n z^n.
struct KSParams {
    double a = 0.5;
    double m = 1.0;
    double l = 0.0;

    double tau() const { return 1.0 / (a * m); }
    double phi() const { return (1.0 + a * l) * tau(); }
    /// Half-width epsilon = min(1, (1 + a(l+1)) tau) of the admissible contour strip.
    double strip() const;
    /// Mellin-Barnes form and complex asymptotics available: a < 1 and l > m - 1/a.
    bool mb_ok() const { return a < 1.0 && phi() > 1.0; }
    void validate() const;
};

/// Contour s = c + i eta, eta in [-H, H].  c <= 0 selects c = strip()/2;
/// half_height <= 0 selects an adaptive height driven by the decay of the
/// integrand.
struct MBContourCfg {
    double abscissa = 0.0;
    double half_height = 0.0;
    int n_nodes = 4001;
    double tol = 1e-12;
};

struct AsymptoticOrder {
    double delta = 0.0;          // (1 + min(phi + a tau, 2)) / 2
    double leading_coeff = 0.0;  // Gamma(1+a(l-m+1)) / Gamma(1+a(l-m))
};

struct AsymptoticValue {
    Complex value;
    AsymptoticOrder order;
};

enum class Regime { Series, SeriesExtended, MellinBarnes, Asymptotic };
std::string to_string(Regime r);

struct KSResult {
    Complex value;
    Regime regime = Regime::Series;
    double est_error = 0.0;
    int terms = 0;      // series terms or quadrature nodes
    int precision = 53; // working precision in bits
};

struct KSEvalCfg {
    double tol = 1e-12;
    double r1 = 20.0;
    double r2 = 1e3;
    /// E(r) level beyond which double-precision summation is not trusted.
    double series_growth_limit = 1e3;
    int max_terms = 10000;
    int max_bits = 1 << 16;
    MBContourCfg contour;
    DoubleGammaCfg dgamma;
};

struct KSBounds {
    double lower = 1.0;
    double upper = 1.0;
    bool lower_trivial = false;  // a = 1: Gamma(1-a) diverges, lower reduces to 0
};

double ks_log_coeff(int n, const KSParams& p);
double ks_coeff(int n, const KSParams& p);

/// Power series; switches to extended precision when the terms are large
/// enough that double-precision cancellation would exceed tol.
Complex ks_series(Complex z, const KSParams& p, double tol = 1e-12);
KSResult ks_series_detail(Complex z, const KSParams& p, double tol = 1e-12, int max_terms = 10000,
                          int max_bits = 1 << 16);

/// E_{a,m,l}(-z) for Re z > 0 by trapezoidal quadrature of the Mellin-Barnes integral.
Complex ks_mellin_barnes(Complex z, const KSParams& p, const MBContourCfg& cfg = {});

/// Leading term of E_{a,m,l}(-z) for |z| -> infinity, Re z > 0.
AsymptoticValue ks_asymptotic(Complex z, const KSParams& p);
AsymptoticOrder ks_asymptotic_order(const KSParams& p);

/// Regime dispatcher for E_{a,m,l}(z).
Complex ks_eval(Complex z, const KSParams& p, double tol = 1e-12);
KSResult ks_eval_detail(Complex z, const KSParams& p, double tol = 1e-12);

KSBounds ks_bounds(double x, double a, double m);

/// Evaluator bound to one parameter triple.  Holds the double gamma tables
/// and the cached Mellin-Barnes kernels; thread-safe.
class KilbasSaigo {
public:
    explicit KilbasSaigo(const KSParams& p, const KSEvalCfg& cfg = {});
    ~KilbasSaigo();
    KilbasSaigo(const KilbasSaigo&) = delete;
    KilbasSaigo& operator=(const KilbasSaigo&) = delete;

    const KSParams& params() const { return p_; }
    const KSEvalCfg& cfg() const { return cfg_; }

    KSResult eval(Complex z) const;
    Complex operator()(Complex z) const { return eval(z).value; }

    KSResult series(Complex z) const;
    /// E(-w) on the contour Re s = c (0 < c < strip()).
    KSResult mellin_barnes(Complex w) const;
    KSResult mellin_barnes(Complex w, const MBContourCfg& cfg) const;
    /// E(-w) = leading/w + integral along Re s = delta, i.e. the contour moved
    /// past the pole at s = 1.
    KSResult mellin_barnes_shifted(Complex w) const;
    AsymptoticValue asymptotic(Complex w) const;

    /// Radius below which the double-precision series is used.
    double r1() const { return r1_; }
    double r2() const { return cfg_.r2; }
    /// log of the Mellin-Barnes prefactor G(phi + a tau)/G(phi).
    double log_prefactor() const { return log_pref_; }
    /// log of Gamma(s)Gamma(1-s)G(phi-s)/G(phi+a tau-s).
    Complex log_kernel(Complex s) const;

private:
    struct Kernel;
    std::shared_ptr<Kernel> kernel(double c, double h) const;
    std::shared_ptr<const std::vector<Complex>> nodes(Kernel& k, std::size_t n) const;
    double series_log_growth(double r) const;
    KSResult integrate(Complex w, double c, double h, double fixed_H, double tol) const;

    KSParams p_;
    KSEvalCfg cfg_;
    std::unique_ptr<DoubleGamma> dg_;
    double log_pref_ = 0.0;
    double r1_ = 0.0;
    std::vector<double> log_c_;  // log c_n for the r1 search
    mutable std::mutex mu_;
    mutable std::vector<std::shared_ptr<Kernel>> kernels_;
};

}  // namespace ksdiff
