#include "ksdiff/stochastic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/non_central_chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "ksdiff/errors.hpp"

namespace ksdiff {

namespace {


void check_alpha_gamma(double alpha, double gamma, const char* who) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument(std::string(who) + ": alpha must lie in (0,1)");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument(std::string(who) + ": gamma must be >= 0");
}

/// Uniform on the open interval (0,1).
double open_uniform(Engine& rng) {
    for (;;) {
        const double u = double(rng() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

/// Runs body(i) for i in [0, n) on up to n_workers threads; the first exception is rethrown.
template <class Body>
void parallel_for(int n, int n_workers, Body body) {
    const int w = std::max(1, std::min(n_workers, n));
    if (w == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(w));
    for (int k = 0; k < w; ++k) {
        const int lo = int((long long)n * k / w), hi = int((long long)n * (k + 1) / w);
        pool.emplace_back([&, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace

void MCConfig::validate() const {
    if (n_paths < 1) throw InvalidArgument("MCConfig: n_paths must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("MCConfig: dt must be > 0");
    if (n_beta_factors < 1) throw InvalidArgument("MCConfig: n_beta_factors must be >= 1");
    if (n_workers < 1) throw InvalidArgument("MCConfig: n_workers must be >= 1");
    if (!(em_dt > 0.0) || !std::isfinite(em_dt)) throw InvalidArgument("MCConfig: em_dt must be > 0");
    if (max_steps < 1) throw InvalidArgument("MCConfig: max_steps must be >= 1");
}

std::string to_string(ZMethod m) {
    return m == ZMethod::BetaProduct ? "beta-product" : "subordinator-integral";
}

Engine make_engine(std::uint64_t seed, std::uint64_t path, Stream stream) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(path), std::uint32_t(path >> 32),
                      std::uint32_t(stream), 0x6b736466u};
    return Engine(seq);
}

double sample_stable(double alpha, Engine& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("sample_stable: alpha must lie in (0,1)");
    const double u = kPi * open_uniform(rng);
    const double e = -std::log(open_uniform(rng));
    const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
    const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    return a * b;
}

double sample_stable_increment(double alpha, double dt, Engine& rng) {
    if (!(dt > 0.0)) throw InvalidArgument("sample_stable_increment: dt must be > 0");
    return std::pow(dt, 1.0 / alpha) * sample_stable(alpha, rng);
}

TimeChangeSample sample_Z(double alpha, double gamma, const MCConfig& cfg, Engine& rng) {
    check_alpha_gamma(alpha, gamma, "sample_Z");
    cfg.validate();
    const double scale = std::pow(cfg.dt, 1.0 / alpha);
    TimeChangeSample out;
    double sigma = 0.0, sum = 0.0;
    long long k = 0;
    while (sigma < 1.0) {
        if (k >= cfg.max_steps)
            throw ConvergenceError("sample_Z: level 1 not reached within the step budget; dt is too small");
        sum += gamma == 0.0 ? 1.0 : std::pow(1.0 - sigma, gamma);
        sigma += scale * sample_stable(alpha, rng);
        ++k;
    }
    out.z = sum * cfg.dt;
    out.steps = k;
    return out;
}

BetaProductPlan beta_product_plan(double alpha, double gamma, int n_factors, bool tail_correction) {
    check_alpha_gamma(alpha, gamma, "beta_product_plan");
    if (n_factors < 1) throw InvalidArgument("beta_product_plan: n_factors must be >= 1");
    using boost::math::digamma;
    using boost::math::trigamma;
    const double beta = alpha + gamma;
    BetaProductPlan plan;
    plan.alpha = alpha;
    plan.gamma = gamma;
    plan.n_factors = n_factors;
    plan.q = (1.0 - alpha) / beta;
    plan.tail_correction = tail_correction;
    double lp = std::lgamma(gamma + 1.0) - std::lgamma(beta + 1.0);
    plan.p.resize(std::size_t(n_factors));
    for (int n = 0; n < n_factors; ++n) {
        plan.p[std::size_t(n)] = 1.0 + n / beta;
        lp += std::log1p((1.0 - alpha) / (beta + n));
    }
    plan.log_prefactor = lp;
    if (tail_correction) {
        // The factors obey log c_n + E log B_n = O(n^-2) and Var log B_n = O(n^-2):
        // sum them directly over a long window and close with the n^-2 remainder.
        const int window = 20000;
        double mean = 0.0, var = 0.0, last_mean = 0.0, last_var = 0.0;
        for (int n = n_factors; n < n_factors + window; ++n) {
            const double p = 1.0 + n / beta;
            last_mean = std::log1p((1.0 - alpha) / (beta + n)) + digamma(p) - digamma(p + plan.q);
            last_var = trigamma(p) - trigamma(p + plan.q);
            mean += last_mean;
            var += last_var;
        }
        const double n_end = n_factors + window - 1;
        plan.tail_log_mean = mean + last_mean * n_end;
        plan.tail_log_var = var + last_var * n_end;
    }
    return plan;
}

TimeChangeSample sample_Z_beta_product(const BetaProductPlan& plan, Engine& rng) {
    double log_z = plan.log_prefactor;
    for (double p : plan.p) {
        boost::random::beta_distribution<double> dist(p, plan.q);
        const double b = dist(rng);
        log_z += b > 0.0 ? std::log(b) : -1e300;
    }
    if (plan.tail_correction && plan.tail_log_var > 0.0) {
        boost::random::normal_distribution<double> g(plan.tail_log_mean, std::sqrt(plan.tail_log_var));
        log_z += g(rng);
    }
    TimeChangeSample out;
    out.z = std::exp(log_z);
    out.method = ZMethod::BetaProduct;
    out.steps = plan.n_factors;
    return out;
}

TimeChangeSample sample_Z_beta_product(double alpha, double gamma, const MCConfig& cfg, Engine& rng) {
    cfg.validate();
    return sample_Z_beta_product(beta_product_plan(alpha, gamma, cfg.n_beta_factors, cfg.beta_tail_correction), rng);
}

std::vector<double> sample_Z_paths(double alpha, double gamma, const MCConfig& cfg, ZMethod method) {
    check_alpha_gamma(alpha, gamma, "sample_Z_paths");
    cfg.validate();
    std::vector<double> z(std::size_t(cfg.n_paths));
    if (method == ZMethod::BetaProduct) {
        const auto plan = beta_product_plan(alpha, gamma, cfg.n_beta_factors, cfg.beta_tail_correction);
        parallel_for(cfg.n_paths, cfg.n_workers, [&](int i) {
            auto rng = make_engine(cfg.seed, std::uint64_t(i), Stream::Beta);
            z[std::size_t(i)] = sample_Z_beta_product(plan, rng).z;
        });
    } else {
        parallel_for(cfg.n_paths, cfg.n_workers, [&](int i) {
            auto rng = make_engine(cfg.seed, std::uint64_t(i), Stream::Subordinator);
            z[std::size_t(i)] = sample_Z(alpha, gamma, cfg, rng).z;
        });
    }
    return z;
}

EstimateWithError summarize(const std::vector<double>& values) {
    EstimateWithError e;
    e.n = (long long)values.size();
    if (values.empty()) return e;
    // Compensated sums in index order keep the result independent of how paths were scheduled.
    double s = 0.0, c = 0.0;
    for (double v : values) {
        const double y = v - c;
        const double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    e.mean = s / double(e.n);
    if (e.n > 1) {
        double ss = 0.0;
        c = 0.0;
        for (double v : values) {
            const double d = v - e.mean;
            const double y = d * d - c;
            const double t = ss + y;
            c = (t - ss) - y;
            ss = t;
        }
        e.stderr_ = std::sqrt(ss / double(e.n - 1) / double(e.n));
    }
    return e;
}

EstimateWithError laplace_from_samples(const std::vector<double>& z, double lambda, double scale) {
    if (!(lambda >= 0.0)) throw InvalidArgument("laplace_from_samples: lambda must be >= 0");
    std::vector<double> v(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) v[i] = std::exp(-lambda * scale * z[i]);
    return summarize(v);
}

EstimateWithError mc_laplace_transform(double alpha, double gamma, double lambda, double t, const MCConfig& cfg) {
    check_alpha_gamma(alpha, gamma, "mc_laplace_transform");
    cfg.validate();
    if (!(lambda >= 0.0)) throw InvalidArgument("mc_laplace_transform: lambda must be >= 0");
    if (!(t >= 0.0)) throw InvalidArgument("mc_laplace_transform: t must be >= 0");
    if (lambda == 0.0 || t == 0.0) return {1.0, 0.0, cfg.n_paths};
    return laplace_from_samples(sample_Z_paths(alpha, gamma, cfg), lambda, std::pow(t, alpha + gamma));
}

double sample_pearson_transition(const PearsonModel& model, double x0, double tau, const MCConfig& cfg, Engine& rng) {
    model.validate();
    if (!model.in_state_space(x0)) throw InvalidArgument("sample_pearson_transition: x0 outside the state space");
    if (!(tau >= 0.0)) throw InvalidArgument("sample_pearson_transition: tau must be >= 0");
    if (tau == 0.0) return x0;
    switch (model.kind) {
    case ModelKind::OU: {
        const double e = std::exp(-model.theta * tau);
        const double sd = std::sqrt(model.p2 * -std::expm1(-2.0 * model.theta * tau));
        boost::random::normal_distribution<double> g(model.p1 + (x0 - model.p1) * e, sd);
        return g(rng);
    }
    case ModelKind::CIR: {
        const double c = -std::expm1(-model.theta * tau) / (2.0 * model.p1);
        const double nc = x0 * std::exp(-model.theta * tau) / c;
        boost::random::non_central_chi_squared_distribution<double> chi(2.0 * model.p2, nc);
        return c * chi(rng);
    }
    case ModelKind::Jacobi: {
        const double edge = 1.0 - 1e-12;
        const long long steps = std::max(1LL, (long long)std::ceil(tau / cfg.em_dt));
        if (steps > cfg.max_steps) throw ConvergenceError("sample_pearson_transition: Euler step budget exceeded");
        const double h = tau / double(steps), sh = std::sqrt(h);
        boost::random::normal_distribution<double> g;
        double x = x0;
        for (long long k = 0; k < steps; ++k) {
            x += model.drift(x) * h + std::sqrt(2.0 * std::max(model.diffusion(x), 0.0)) * sh * g(rng);
            int tries = 0;
            while (x > edge || x < -edge) {
                x = x > edge ? 2.0 * edge - x : -2.0 * edge - x;
                if (++tries > 8) throw DomainError("sample_pearson_transition: Jacobi reflection failed");
            }
        }
        return x;
    }
    }
    throw InvalidArgument("sample_pearson_transition: unknown model");
}

double sample_time_changed_pearson(const PearsonModel& model, const StretchedOrder& ord, double t, double x0,
                                   const MCConfig& cfg, std::uint64_t path) {
    ord.validate();
    if (!(t >= 0.0)) throw InvalidArgument("sample_time_changed_pearson: t must be >= 0");
    if (!model.in_state_space(x0)) throw InvalidArgument("sample_time_changed_pearson: x0 outside the state space");
    if (t == 0.0) return x0;
    double tau = 0.0;
    if (ord.alpha == 1.0) {
        tau = t;
    } else {
        auto zr = make_engine(cfg.seed, path, Stream::Subordinator);
        tau = std::pow(t, ord.beta()) * sample_Z(ord.alpha, ord.gamma, cfg, zr).z;
    }
    auto xr = make_engine(cfg.seed, path, Stream::Diffusion);
    return sample_pearson_transition(model, x0, tau, cfg, xr);
}

std::vector<double> sample_time_changed_pearson_paths(const PearsonModel& model, const StretchedOrder& ord, double t,
                                                      double x0, const MCConfig& cfg) {
    cfg.validate();
    std::vector<double> x(std::size_t(cfg.n_paths));
    parallel_for(cfg.n_paths, cfg.n_workers, [&](int i) {
        x[std::size_t(i)] = sample_time_changed_pearson(model, ord, t, x0, cfg, std::uint64_t(i));
    });
    return x;
}

EstimateWithError hyperbolic_subordination_estimate(const PearsonModel& model, const StretchedOrder& ord, double A,
                                                    double B, const SpectralCoeffs& coeffs, double t, double y,
                                                    const MCConfig& cfg) {
    ord.validate(true);
    cfg.validate();
    if (coeffs.kind != CoeffKind::Backward)
        throw InvalidArgument("hyperbolic_subordination_estimate: backward coefficients required");
    if (!(t >= 0.0)) throw InvalidArgument("hyperbolic_subordination_estimate: t must be >= 0");
    if (!model.in_state_space(y)) throw InvalidArgument("hyperbolic_subordination_estimate: y outside the state space");
    TelegraphCoeffs{A, B, 1.0}.validate();
    const int N = coeffs.N();
    const auto q = orthonormal_polys(model, N, y);
    // Classical temporal factor of mode n at time s: K1 e^{a* s} + K2 e^{b* s} (e^{-lambda s / B} when A = 0).
    struct Mode {
        double weight;
        RootsAndWeights roots;
        double kappa;
    };
    double constant = 0.0;
    std::vector<Mode> modes;
    for (int n = 0; n < N; ++n) {
        const double w = coeffs.values[std::size_t(n)] * q[std::size_t(n)];
        if (w == 0.0) continue;
        if (n == 0) {
            constant += w;
            continue;
        }
        const TelegraphCoeffs c{A, B, eigenvalue(model, n)};
        Mode m{w, {}, 0.0};
        if (A == 0.0)
            m.kappa = reduce_to_first_order(c);
        else
            m.roots = telegraph_roots(c);
        modes.push_back(m);
    }
    auto classical = [&](double s) {
        double v = constant;
        for (const auto& m : modes) {
            if (A == 0.0) {
                v += m.weight * std::exp(-m.kappa * s);
            } else {
                const Complex e1 = m.roots.K1 * std::exp(m.roots.a_star * s);
                const Complex e2 = m.roots.conjugate ? std::conj(e1) : m.roots.K2 * std::exp(m.roots.b_star * s);
                v += m.weight * (e1 + e2).real();
            }
        }
        return v;
    };
    if (t == 0.0) return {classical(0.0), 0.0, cfg.n_paths};
    std::vector<double> v(std::size_t(cfg.n_paths));
    if (ord.alpha == 1.0) {
        std::fill(v.begin(), v.end(), classical(std::pow(t, ord.beta())));
    } else {
        const auto z = sample_Z_paths(ord.alpha, ord.gamma, cfg);
        const double scale = std::pow(t, ord.beta());
        for (std::size_t i = 0; i < z.size(); ++i) v[i] = classical(scale * z[i]);
    }
    return summarize(v);
}

double kolmogorov_q(double x) {
    if (!(x > 0.0)) return 1.0;
    if (x < 0.3) {
        // Dual theta series: 1 - sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2)).
        double s = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double j = 2.0 * k - 1.0;
            s += std::exp(-j * j * kPi * kPi / (8.0 * x * x));
        }
        return std::clamp(1.0 - std::sqrt(2.0 * kPi) / x * s, 0.0, 1.0);
    }
    double s = 0.0, sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += sign * term;
        if (term < 1e-17) break;
        sign = -sign;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

KSTest ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: samples must be non-empty");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / na - double(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    KSTest r;
    r.statistic = d;
    r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    return r;
}

KSTest ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw InvalidArgument("ks_one_sample: sample must be non-empty");
    std::sort(a.begin(), a.end());
    const double n = double(a.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = cdf(a[i]);
        d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
    }
    const double sq = std::sqrt(n);
    KSTest r;
    r.statistic = d;
    r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    return r;
}

}  // namespace ksdiff
