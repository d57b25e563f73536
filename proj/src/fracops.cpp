#include "ksdiff/fracops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ksdiff/errors.hpp"

namespace ksdiff {
namespace {

std::vector<double> l1_caputo(const std::vector<double>& f, double h, double alpha, std::size_t stride) {
    // Nodes 0, stride, 2 stride, ... with step stride*h.
    const std::size_t n = (f.size() - 1) / stride + 1;
    const double step = h * double(stride);
    std::vector<double> b(n);
    for (std::size_t j = 0; j < n; ++j) b[j] = std::pow(double(j + 1), 1.0 - alpha) - std::pow(double(j), 1.0 - alpha);
    std::vector<double> df(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) df[k] = f[(k + 1) * stride] - f[k * stride];
    const double scale = std::pow(step, -alpha) / std::tgamma(2.0 - alpha);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < i; ++k) s += b[i - 1 - k] * df[k];
        out[i] = scale * s;
    }
    return out;
}

std::vector<double> classical_derivative(const std::vector<double>& f, double h, std::size_t stride) {
    const std::size_t n = (f.size() - 1) / stride + 1;
    const double step = h * double(stride);
    auto at = [&](std::size_t i) { return f[i * stride]; };
    std::vector<double> out(n);
    out[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * step);
    for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (at(i + 1) - at(i - 1)) / (2.0 * step);
    out[n - 1] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * step);
    return out;
}

std::vector<double> grid_operator(const std::vector<double>& f, double h, const StretchedOrder& ord,
                                  std::size_t stride, const CaputoOptions& opt) {
    std::vector<double> d = ord.alpha == 1.0 ? classical_derivative(f, h, stride) : l1_caputo(f, h, ord.alpha, stride);
    const double step = h * double(stride);
    for (std::size_t i = 1; i < d.size(); ++i) d[i] *= std::pow(double(i) * step, -ord.gamma);
    switch (opt.origin) {
        case OriginRule::Zero: d[0] = 0.0; break;
        case OriginRule::Extrapolate: d[0] = 3.0 * d[1] - 3.0 * d[2] + d[3]; break;
        case OriginRule::Value: d[0] = opt.origin_value; break;
    }
    return d;
}

}  // namespace

void StretchedOrder::validate(bool solver) const {
    if (!std::isfinite(alpha) || !std::isfinite(gamma)) throw InvalidArgument("StretchedOrder: non-finite order");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("StretchedOrder: alpha must lie in (0, 1]");
    if (!(gamma >= 0.0)) throw InvalidArgument("StretchedOrder: gamma must be >= 0");
    if (solver && alpha + gamma > 1.0 + 1e-15) throw InvalidArgument("StretchedOrder: alpha + gamma must be <= 1");
}

PowerRule power_rule(double beta, const StretchedOrder& ord) {
    ord.validate();
    if (!(beta >= 0.0)) throw InvalidArgument("power_rule: beta must be >= 0");
    if (beta == 0.0) return {0.0, 0.0};
    return {1.0 / boost::math::tgamma_delta_ratio(beta + 1.0 - ord.alpha, ord.alpha), beta - ord.beta()};
}

double bracket(int n, const StretchedOrder& ord) {
    ord.validate();
    if (n < 1) throw InvalidArgument("bracket: n must be >= 1");
    const double x = ord.beta() * n;
    return 1.0 / boost::math::tgamma_delta_ratio(x - ord.alpha + 1.0, ord.alpha);
}

double log_bracket_factorial(int n, const StretchedOrder& ord) {
    ord.validate();
    if (n < 0) throw InvalidArgument("bracket_factorial: n must be >= 0");
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s -= std::log(boost::math::tgamma_delta_ratio(ord.beta() * k - ord.alpha + 1.0, ord.alpha));
    return s;
}

double bracket_factorial(int n, const StretchedOrder& ord) { return std::exp(log_bracket_factorial(n, ord)); }

CaputoResult apply_stretched_caputo(const std::vector<double>& samples, double T, const StretchedOrder& ord,
                                    const CaputoOptions& opt) {
    ord.validate();
    if (samples.size() < 3) throw InvalidArgument("apply_stretched_caputo: need at least 3 nodes");
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("apply_stretched_caputo: T must be positive");
    for (double v : samples)
        if (!std::isfinite(v)) throw InvalidArgument("apply_stretched_caputo: samples must be finite");
    if (opt.origin == OriginRule::Extrapolate && samples.size() < 4)
        throw InvalidArgument("apply_stretched_caputo: extrapolation needs at least 4 nodes");
    const double h = T / double(samples.size() - 1);
    CaputoResult res;
    res.values = grid_operator(samples, h, ord, 1, opt);
    if (opt.tol > 0.0 && samples.size() >= 9) {
        // Same operator on every second node; the L1 error is O(h^(2-alpha)).
        std::vector<double> even(samples.begin(), samples.begin() + ((samples.size() - 1) / 2) * 2 + 1);
        const auto coarse = grid_operator(even, h, ord, 2, opt);
        const double ratio = std::pow(2.0, 2.0 - ord.alpha) - 1.0;
        for (std::size_t k = 2; k < coarse.size(); ++k)
            res.est_error = std::max(res.est_error, std::abs(coarse[k] - res.values[2 * k]) / ratio);
        res.coarse_warning = res.est_error > opt.tol;
    }
    return res;
}

double first_order_solution(double kappa, const StretchedOrder& ord, double t, double tol) {
    ord.validate();
    if (!(t >= 0.0)) throw InvalidArgument("first_order_solution: t must be >= 0");
    if (t == 0.0) return 1.0;
    return ks_eval(-kappa * std::pow(t, ord.beta()), ord.ks(), tol).real();
}

double fibonacci_U(int n, double a, double b) {
    if (n < 0) throw InvalidArgument("fibonacci_U: n must be >= 0");
    if (n == 0) return 0.0;
    double s = 0.0;
    for (int j = 0; j <= (n - 1) / 2; ++j)
        s += boost::math::binomial_coefficient<double>(unsigned(n - 1 - j), unsigned(j)) *
             std::pow(-a, n - 1 - 2 * j) * std::pow(-b, j);
    return s;
}

Complex fibonacci_U_closed(int n, double a, double b) {
    if (n < 0) throw InvalidArgument("fibonacci_U_closed: n must be >= 0");
    const Complex root = std::sqrt(Complex(0.25 * a * a - b, 0.0));
    const Complex as = -0.5 * a + root, bs = -0.5 * a - root;
    if (std::abs(as - bs) <= 1e-14 * std::max(1.0, std::abs(as))) return double(n) * std::pow(as, n - 1);
    return (std::pow(as, n) - std::pow(bs, n)) / (as - bs);
}

void TelegraphCoeffs::validate() const {
    if (!std::isfinite(A) || !std::isfinite(B) || !std::isfinite(lambda))
        throw InvalidArgument("TelegraphCoeffs: non-finite coefficient");
    if (A < 0.0 || B < 0.0) throw InvalidArgument("TelegraphCoeffs: A and B must be >= 0");
    if (A == 0.0 && B == 0.0) throw InvalidArgument("TelegraphCoeffs: A and B cannot both vanish");
    if (!(lambda > 0.0)) throw InvalidArgument("TelegraphCoeffs: lambda must be positive");
}

RootsAndWeights telegraph_roots(const TelegraphCoeffs& c) {
    c.validate();
    if (c.A == 0.0) throw InvalidArgument("telegraph_roots: A = 0, use reduce_to_first_order");
    const double a = c.a(), b = c.b();
    const double disc = 0.25 * a * a - b;
    if (std::abs(disc) <= 1e-13 * std::max(0.25 * a * a, b))
        throw DegenerateRootError("telegraph_roots: double root a* = b* (B^2 = 4 A lambda)");
    RootsAndWeights r;
    r.conjugate = disc < 0.0;
    const Complex root = r.conjugate ? Complex(0.0, std::sqrt(-disc)) : Complex(std::sqrt(disc), 0.0);
    r.a_star = -0.5 * a + root;
    r.b_star = r.conjugate ? std::conj(r.a_star) : -0.5 * a - root;
    const Complex diff = r.a_star - r.b_star;
    r.K1 = (r.a_star - b) / (r.a_star * diff);
    r.K2 = r.conjugate ? std::conj(r.K1) : (b - r.b_star) / (r.b_star * diff);
    return r;
}

double reduce_to_first_order(const TelegraphCoeffs& c) {
    c.validate();
    if (c.A != 0.0) throw InvalidArgument("reduce_to_first_order: requires A = 0");
    return c.lambda / c.B;
}

Complex second_order_solution_complex(const TelegraphCoeffs& c, const StretchedOrder& ord, double t, double tol) {
    ord.validate();
    if (!(t >= 0.0)) throw InvalidArgument("second_order_solution: t must be >= 0");
    if (c.A == 0.0) return first_order_solution(reduce_to_first_order(c), ord, t, tol);
    const RootsAndWeights r = telegraph_roots(c);
    if (t == 0.0) return r.K1 + r.K2;
    const double tb = std::pow(t, ord.beta());
    const KSParams p = ord.ks();
    return r.K1 * ks_eval(r.a_star * tb, p, tol) + r.K2 * ks_eval(r.b_star * tb, p, tol);
}

double second_order_solution(const TelegraphCoeffs& c, const StretchedOrder& ord, double t, double tol) {
    ord.validate();
    if (!(t >= 0.0)) throw InvalidArgument("second_order_solution: t must be >= 0");
    if (c.A == 0.0) return first_order_solution(reduce_to_first_order(c), ord, t, tol);
    const RootsAndWeights r = telegraph_roots(c);
    if (t == 0.0) return 1.0;
    const double tb = std::pow(t, ord.beta());
    const KSParams p = ord.ks();
    if (r.conjugate) return 2.0 * (r.K1 * ks_eval(r.a_star * tb, p, tol)).real();
    const Complex v = r.K1 * ks_eval(r.a_star * tb, p, tol) + r.K2 * ks_eval(r.b_star * tb, p, tol);
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
        throw NumericError("second_order_solution: imaginary residue " + std::to_string(v.imag()));
    return v.real();
}

}  // namespace ksdiff
