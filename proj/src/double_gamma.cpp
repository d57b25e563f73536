#include "ksdiff/double_gamma.hpp"

#include <cmath>
#include <string>

#include "ksdiff/errors.hpp"

namespace ksdiff {
namespace {

constexpr int kTailOrder = 60;      // highest power of z kept in the product tail
constexpr int kEulerMaclaurin = 6;  // Bernoulli terms in the tail sums
constexpr double kTailRatio = 2.5;  // M*tau >= kTailRatio * (|z| + 1)

// Neumaier compensated sum.
class CompSum {
public:
    void add(double x) {
        const double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0, c_ = 0.0;
};

double factorial(int n) { return std::tgamma(n + 1.0); }

// Sum_{k}^{m-1} g(k) + g(m)/2 minus its integral, with the Euler-Maclaurin
// derivative terms at m removed.  kind 0 -> C(tau), kind 1 -> D(tau).
double limit_value(double tau, int m, int kind) {
    CompSum s;
    for (int k = 1; k < m; ++k) s.add(kind == 0 ? digamma(k * tau) : trigamma(k * tau));
    const double x = m * tau;
    if (kind == 0) {
        s.add(0.5 * digamma(x));
        s.add(-(std::lgamma(x) - kLogSqrt2Pi) / tau);
    } else {
        s.add(0.5 * trigamma(x));
        s.add(-digamma(x) / tau);
    }
    for (int j = 1; j <= kEulerMaclaurin; ++j) {
        const double w = bernoulli_b2n(j) / factorial(2 * j) * std::pow(tau, 2 * j - 1);
        s.add(-w * polygamma(2 * j - 1 + kind, x));
    }
    return s.value();
}

double limit_const(double tau, const DoubleGammaCfg& cfg, int kind) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("double gamma: tau must be positive");
    if (cfg.limit_terms < 2) throw InvalidArgument("double gamma: limit_terms must be >= 2");
    const double v1 = limit_value(tau, cfg.limit_terms, kind);
    const double v2 = limit_value(tau, 2 * cfg.limit_terms, kind);
    if (std::abs(v2 - v1) > 10.0 * cfg.tol)
        throw ConvergenceError(std::string(kind == 0 ? "C" : "D") +
                               "(tau): limit not stable under doubling of limit_terms");
    return v2;
}

int min_product_terms(double tau, double radius, int requested) {
    const double need = std::ceil(kTailRatio * (radius + 1.0) / tau);
    return std::max(requested, static_cast<int>(std::min(need, 1e8)));
}

Complex poly_log_form(const StirlingCoeffs& c, Complex z) {
    return (c.a2 * z * z + c.a1 * z + c.a0) * std::log(z) + c.b2 * z * z + c.b1 * z + c.b0;
}

StirlingCoeffs leading_coeffs(double tau) {
    StirlingCoeffs c;
    const double lt = std::log(tau);
    c.a2 = 1.0 / (2.0 * tau);
    c.a1 = -0.5 * (1.0 + 1.0 / tau);
    c.a0 = tau / 12.0 + 0.25 + 1.0 / (12.0 * tau);
    c.b2 = -(1.5 + lt) / (2.0 * tau);
    c.b1 = 0.5 * ((1.0 + 1.0 / tau) * (1.0 + lt) + std::log(2.0 * kPi));
    return c;
}

// Coefficients d_1..d_K such that sum d_k z^{-k} completes the Stirling form
// as an asymptotic series.  Matching negative powers in
// F(z+1) - F(z) = log Gamma(z/tau) gives a triangular system.
std::vector<double> stirling_corrections(const StirlingCoeffs& c, double tau, int K) {
    std::vector<double> d(K + 1, 0.0);
    if (K <= 0) return d;
    auto ell = [](int i) { return (i % 2 == 1 ? 1.0 : -1.0) / i; };
    const double q2 = c.a2, q1 = 2.0 * c.a2 + c.a1, q0 = c.a2 + c.a1 + c.a0;
    auto w = [&](int p) {
        double g = 0.0;
        if (p % 2 == 1) {
            const int j = (p + 1) / 2;
            g = bernoulli_b2n(j) * std::pow(tau, 2 * j - 1) / (2.0 * j * (2.0 * j - 1.0));
        }
        return g - (q2 * ell(p + 2) + q1 * ell(p + 1) + q0 * ell(p));
    };
    auto binom = [](int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); };
    for (int p = 2; p <= K + 1; ++p) {
        double rhs = w(p);
        for (int k = 1; k <= p - 2; ++k) rhs -= d[k] * ((p - k) % 2 == 0 ? 1.0 : -1.0) * binom(p - 1, p - k);
        d[p - 1] = -rhs / (p - 1);
    }
    return d;
}

}  // namespace

void DoubleGammaCfg::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("DoubleGammaCfg: tau must be positive");
    if (product_terms < 1) throw InvalidArgument("DoubleGammaCfg: product_terms must be positive");
    if (limit_terms < 2) throw InvalidArgument("DoubleGammaCfg: limit_terms must be >= 2");
    if (!(stirling_threshold > 0.0)) throw InvalidArgument("DoubleGammaCfg: stirling_threshold must be positive");
    if (!(tol > 0.0)) throw InvalidArgument("DoubleGammaCfg: tol must be positive");
    if (stirling_corrections < 0) throw InvalidArgument("DoubleGammaCfg: stirling_corrections must be >= 0");
}

double c_const(double tau, const DoubleGammaCfg& cfg) { return limit_const(tau, cfg, 0); }
double d_const(double tau, const DoubleGammaCfg& cfg) { return limit_const(tau, cfg, 1); }

DoubleGamma::DoubleGamma(const DoubleGammaCfg& cfg) : DoubleGamma(cfg, true) {}

DoubleGamma::DoubleGamma(const DoubleGammaCfg& cfg, bool with_stirling) : cfg_(cfg) {
    cfg_.validate();
    const double tau = cfg_.tau;
    c_ = c_const(tau, cfg_);
    d_ = d_const(tau, cfg_);
    a_tilde_ = 0.5 * tau * std::log(2.0 * kPi * tau) + 0.5 * std::log(tau) - tau * c_;
    b_tilde_ = -tau * std::log(tau) - tau * tau * d_;
    tab_ = build_tables(min_product_terms(tau, cfg_.stirling_threshold, cfg_.product_terms));
    sc_ = leading_coeffs(tau);
    if (with_stirling) {
        DoubleGammaCfg twice = cfg_;
        twice.tau = 2.0 * tau;
        const DoubleGamma g2(twice, false);
        const double lg_half = log_g_product(0.5).real();
        const double lg_tau = g2.log_g_product(tau).real();
        sc_.b0 = (2.0 * lg_half + lg_tau - 0.5 * (1.0 + tau) * std::log(2.0 * kPi) -
                  sc_.a0 * std::log(tau * tau * tau / 2.0) - std::log(2.0)) / 3.0;
        corr_ = stirling_corrections(sc_, tau, cfg_.stirling_corrections);
    }
}

DoubleGamma::Tables DoubleGamma::build_tables(int M) const {
    const double tau = cfg_.tau;
    Tables t;
    t.M = M;
    t.lg.resize(M + 1);
    t.psi.resize(M + 1);
    t.psi1.resize(M + 1);
    for (int m = 1; m <= M; ++m) {
        const double x = m * tau;
        t.lg[m] = std::lgamma(x);
        t.psi[m] = digamma(x);
        t.psi1[m] = trigamma(x);
    }
    // Tail sum_{m>M} f_m(z) with f_m = -sum_{k>=3} z^k psi^{(k-1)}(m tau) / k!.
    // S_n = sum_{m>M} psi^{(n)}(m tau) by Euler-Maclaurin from m = M.
    const double x = M * tau;
    t.tail.assign(kTailOrder + 1, 0.0);
    for (int k = 3; k <= kTailOrder; ++k) {
        const int n = k - 1;
        double s = -polygamma(n - 1, x) / tau - 0.5 * polygamma(n, x);
        for (int j = 1; j <= kEulerMaclaurin; ++j)
            s -= bernoulli_b2n(j) / factorial(2 * j) * std::pow(tau, 2 * j - 1) * polygamma(n + 2 * j - 1, x);
        t.tail[k] = -s / factorial(k);
        if (t.tail[k] == 0.0 || !std::isfinite(t.tail[k])) {
            t.tail.resize(k);
            break;
        }
    }
    return t;
}

bool DoubleGamma::is_zero_of_g(Complex z) const {
    if (z.imag() != 0.0 || z.real() > 0.0) return false;
    const double r = -z.real();
    const double tau = cfg_.tau;
    const double eps = 1e-13 * std::max(1.0, r);
    for (int mu = 0; mu * tau <= r + eps; ++mu) {
        const double rest = r - mu * tau;
        if (std::abs(rest - std::round(rest)) <= eps && std::round(rest) >= 0.0) return true;
    }
    return false;
}

Complex DoubleGamma::product_with(const Tables& t, Complex z) const {
    if (is_zero_of_g(z)) throw PoleError("log_double_gamma: z is a zero of G(z; tau)");
    const double tau = cfg_.tau;
    const Complex z2 = z * z;
    CompSum re, im;
    auto add = [&](Complex v) {
        re.add(v.real());
        im.add(v.imag());
    };
    add(-std::log(tau) - log_gamma(z) + a_tilde_ * z / tau + b_tilde_ * z2 / (2.0 * tau * tau));
    for (int m = 1; m <= t.M; ++m) add(t.lg[m] - log_gamma(z + m * tau) + z * t.psi[m] + 0.5 * z2 * t.psi1[m]);

    const double ratio = std::abs(z) / (t.M * tau);
    if (ratio >= 1.0) throw ConvergenceError("log_double_gamma: product tail does not converge for this |z|");
    Complex tail = 0.0;
    Complex zk = z2;
    double last = 0.0;
    for (std::size_t k = 3; k < t.tail.size(); ++k) {
        zk *= z;
        const Complex term = t.tail[k] * zk;
        tail += term;
        last = std::abs(term);
        if (last <= 1e-18 * (1.0 + std::abs(tail))) break;
    }
    if (last > cfg_.tol) throw ConvergenceError("log_double_gamma: product tail estimate exceeds tolerance");
    add(tail);
    return {re.value(), im.value()};
}

Complex DoubleGamma::log_g_product(Complex z) const {
    if (std::abs(z) <= cfg_.stirling_threshold || std::abs(z) * kTailRatio < tab_.M * cfg_.tau)
        return product_with(tab_, z);
    const Tables big = build_tables(min_product_terms(cfg_.tau, std::abs(z), cfg_.product_terms));
    return product_with(big, z);
}

Complex DoubleGamma::log_g_stirling_bare(Complex z) const {
    if (!(z.real() > 0.0)) throw DomainError("stirling_log_G: requires Re z > 0");
    return poly_log_form(sc_, z);
}

Complex DoubleGamma::log_g_stirling(Complex z) const {
    Complex v = log_g_stirling_bare(z);
    const Complex iz = 1.0 / z;
    Complex p = iz;
    for (std::size_t k = 1; k < corr_.size(); ++k) {
        v += corr_[k] * p;
        p *= iz;
    }
    return v;
}

Complex DoubleGamma::log_g(Complex z) const {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw InvalidArgument("log_double_gamma: non-finite z");
    if (std::abs(z) <= cfg_.stirling_threshold) return product_with(tab_, z);
    if (z.real() > 0.0) return log_g_stirling(z);
    // Move into the right half-plane with G(z+k) = G(z) prod Gamma((z+j)/tau).
    const int k = static_cast<int>(std::ceil(-z.real())) + 1;
    return log_g(z + double(k)) - double_gamma_ratio_shift(z, k, cfg_.tau);
}

StirlingCoeffs stirling_coeffs(double tau, const DoubleGammaCfg& cfg) {
    DoubleGammaCfg c = cfg;
    c.tau = tau;
    return DoubleGamma(c).stirling();
}

Complex log_double_gamma(Complex z, const DoubleGammaCfg& cfg) { return DoubleGamma(cfg).log_g(z); }

Complex stirling_log_G(Complex z, double tau) {
    DoubleGammaCfg cfg;
    cfg.tau = tau;
    return DoubleGamma(cfg).log_g_stirling_bare(z);
}

Complex double_gamma_ratio_shift(Complex z, int k, double tau) {
    if (k < 0) throw InvalidArgument("double_gamma_ratio_shift: k must be non-negative");
    if (!(tau > 0.0)) throw InvalidArgument("double_gamma_ratio_shift: tau must be positive");
    Complex s = 0.0;
    for (int j = 0; j < k; ++j) {
        const Complex w = (z + double(j)) / tau;
        if (is_nonpositive_integer(w)) throw PoleError("double_gamma_ratio_shift: Gamma pole at (z+j)/tau");
        s += log_gamma(w);
    }
    return s;
}

}  // namespace ksdiff
