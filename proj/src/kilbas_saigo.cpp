#include "ksdiff/kilbas_saigo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <boost/math/special_functions/gamma.hpp>

#include "ksdiff/errors.hpp"
#include "mp_series.hpp"

namespace ksdiff {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr std::size_t kMaxNodes = 400000;
constexpr std::size_t kNodeChunk = 512;

/// Gamma(x) / Gamma(x + a) for x > 0.
double gamma_ratio(double x, double a) { return boost::math::tgamma_delta_ratio(x, a); }

double log_add(double x, double y) {
    if (x < y) std::swap(x, y);
    if (y == -std::numeric_limits<double>::infinity()) return x;
    return x + std::log1p(std::exp(y - x));
}

/// log sin(pi s) continued along the contour; rewritten through
/// exp(2 i pi s) so the exponentially large half never forms.
Complex log_sin_pi(Complex s) {
    if (s.imag() < 0.0) return std::conj(log_sin_pi(std::conj(s)));
    const Complex i(0.0, 1.0);
    const Complex e2 = std::exp(2.0 * i * kPi * s);
    return std::log(Complex(0.0, 0.5)) - i * kPi * s + std::log(1.0 - e2);
}

double pick_h(double d_eff, double tol, double log_w_span) {
    const double digits = -std::log(std::max(tol, 1e-300) * 1e-2);
    return 2.0 * kPi * d_eff / (digits + d_eff * log_w_span);
}

/// Quantised |log w| range covered by a kernel, so nearby w share one grid.
double log_span(double r2, Complex w) {
    const double lw = std::abs(std::log(std::abs(w)));
    const double base = std::log(std::max(r2, 1.0));
    if (lw <= base) return base;
    const double step = std::log(10.0);
    return std::ceil(lw / step) * step;
}

void check_sector(Complex w) {
    if (!(w.real() > 0.0)) throw DomainError("Mellin-Barnes: argument must satisfy Re(w) > 0");
}

}  // namespace

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Series: return "series";
        case Regime::SeriesExtended: return "series-mpfr";
        case Regime::MellinBarnes: return "mellin-barnes";
        case Regime::Asymptotic: return "asymptotic";
    }
    return "unknown";
}

double KSParams::strip() const { return std::min(1.0, (1.0 + a * (l + 1.0)) * tau()); }

void KSParams::validate() const {
    if (!std::isfinite(a) || !std::isfinite(m) || !std::isfinite(l))
        throw InvalidArgument("KSParams: parameters must be finite");
    if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("KSParams: a must lie in (0, 1]");
    if (!(m > 0.0)) throw InvalidArgument("KSParams: m must be positive");
    if (!(l > -1.0 / a)) throw InvalidArgument("KSParams: l must exceed -1/a");
}

double ks_log_coeff(int n, const KSParams& p) {
    p.validate();
    if (n < 0) throw InvalidArgument("ks_coeff: n must be non-negative");
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += std::log(gamma_ratio(1.0 + p.a * (k * p.m + p.l), p.a));
    return s;
}

double ks_coeff(int n, const KSParams& p) {
    const double lc = ks_log_coeff(n, p);
    if (lc > std::log(std::numeric_limits<double>::max()))
        throw RangeError("ks_coeff: c_n overflows double; use ks_log_coeff");
    return std::exp(lc);
}

KSResult ks_series_detail(Complex z, const KSParams& p, double tol, int max_terms, int max_bits) {
    p.validate();
    if (!(tol > 0.0)) throw InvalidArgument("ks_series: tol must be positive");
    KSResult res;
    res.regime = Regime::Series;
    if (z == Complex(0.0, 0.0)) {
        res.value = 1.0;
        res.terms = 1;
        return res;
    }
    if (z.imag() < 0.0) {
        res = ks_series_detail(std::conj(z), p, tol, max_terms, max_bits);
        res.value = std::conj(res.value);
        return res;
    }
    const double r = std::abs(z);
    const double log_r = std::log(r);
    // Log-space pass: term count and the size of the largest partial terms.
    const double trunc_target = std::log(tol * 1e-3 / std::max(1.0, r));
    std::vector<double> ratio;
    double log_t = 0.0;
    double log_abs_sum = 0.0;
    int n = 0;
    for (;; ++n) {
        if (n >= max_terms)
            throw ConvergenceError("ks_series: no convergence within " + std::to_string(max_terms) + " terms");
        const double q = gamma_ratio(1.0 + p.a * (n * p.m + p.l), p.a);
        ratio.push_back(q);
        const double log_next = log_t + std::log(q) + log_r;
        if (log_next < log_t && log_next < trunc_target && std::log(q) + log_r < std::log(0.5)) {
            // remaining tail is bounded by 2 |t_{n+1}|
            res.est_error = 2.0 * std::exp(log_next);
            break;
        }
        log_t = log_next;
        log_abs_sum = log_add(log_abs_sum, log_t);
    }
    const int n_terms = n + 1;
    res.terms = n_terms;

    // Double-precision attempt.
    Complex s = 0.0, t = 1.0;
    for (int k = 0; k < n_terms; ++k) {
        s += t;
        if (k + 1 < n_terms) t *= ratio[k] * z;
    }
    const double round_err = 4.0 * kEps * std::exp(log_abs_sum);
    auto scale_of = [&](Complex v) { return std::min(1.0, std::max(std::abs(v), 1e-300)); };
    if (round_err <= 0.5 * tol * scale_of(s)) {
        res.value = s;
        res.est_error += round_err;
        if (z.imag() == 0.0) res.value.imag(0.0);
        return res;
    }

    // Extended precision: bits to carry exp(log_abs_sum) down to tol * |E|.
    res.regime = Regime::SeriesExtended;
    double log_scale = std::log(scale_of(s));
    Complex value = s;
    for (int attempt = 0; attempt < 4; ++attempt) {
        const double need = (log_abs_sum - std::log(tol) - log_scale) / std::log(2.0) + 24.0;
        const int bits = std::max(64, int(std::ceil(need)));
        if (bits > max_bits)
            throw RangeError("ks_series: required precision of " + std::to_string(bits) + " bits exceeds cap");
        value = detail::ks_series_mpfr(z, p.a, p.m, p.l, n_terms, bits);
        res.precision = bits;
        const double new_scale = std::log(scale_of(value));
        if (new_scale >= log_scale - 1.0) break;
        log_scale = new_scale;  // more cancellation than the double pass suggested
    }
    res.value = value;
    if (z.imag() == 0.0) res.value.imag(0.0);
    res.est_error +=
        std::exp(log_abs_sum) * std::ldexp(1.0, -res.precision) + kEps * std::abs(value);
    return res;
}

Complex ks_series(Complex z, const KSParams& p, double tol) { return ks_series_detail(z, p, tol).value; }

AsymptoticOrder ks_asymptotic_order(const KSParams& p) {
    p.validate();
    if (!p.mb_ok()) throw DomainError("ks_asymptotic: requires a < 1 and l > m - 1/a");
    AsymptoticOrder o;
    const double edge = std::min(p.phi() + p.a * p.tau(), 2.0);
    o.delta = 0.5 * (1.0 + edge);
    o.leading_coeff = 1.0 / gamma_ratio(1.0 + p.a * (p.l - p.m), p.a);
    return o;
}

AsymptoticValue ks_asymptotic(Complex z, const KSParams& p) {
    check_sector(z);
    AsymptoticValue v;
    v.order = ks_asymptotic_order(p);
    v.value = v.order.leading_coeff / z;
    return v;
}

KSBounds ks_bounds(double x, double a, double m) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("ks_bounds: x must be finite and >= 0");
    if (!(a >= 0.0 && a <= 1.0)) throw InvalidArgument("ks_bounds: a must lie in [0, 1]");
    if (!(m > 0.0)) throw InvalidArgument("ks_bounds: m must be positive");
    KSBounds b;
    b.upper = 1.0 / (1.0 + gamma_ratio(1.0 + a * (m - 1.0), a) * x);
    if (a == 1.0) {
        b.lower_trivial = true;
        b.lower = 0.0;
    } else {
        b.lower = 1.0 / (1.0 + std::tgamma(1.0 - a) * x);
    }
    return b;
}

// ----------------------------------------------------------------------------

struct KilbasSaigo::Kernel {
    double c = 0.0;
    double h = 0.0;
    std::shared_ptr<const std::vector<Complex>> values;  // log K(c + i j h), j = 0, 1, ...
};

KilbasSaigo::KilbasSaigo(const KSParams& p, const KSEvalCfg& cfg) : p_(p), cfg_(cfg) {
    p_.validate();
    if (!(cfg_.tol > 0.0)) throw InvalidArgument("KSEvalCfg: tol must be positive");
    if (!(cfg_.r1 > 0.0) || !(cfg_.r2 >= cfg_.r1)) throw InvalidArgument("KSEvalCfg: need 0 < r1 <= r2");
    if (p_.mb_ok()) {
        DoubleGammaCfg dc = cfg_.dgamma;
        dc.tau = p_.tau();
        dg_ = std::make_unique<DoubleGamma>(dc);
        const double phi = p_.phi();
        log_pref_ = (dg_->log_g(phi + p_.a * p_.tau()) - dg_->log_g(phi)).real();
    }
    // log c_n until the terms at radius cfg.r1 are negligible.
    const double log_r = std::log(cfg_.r1);
    double lc = 0.0;
    log_c_.push_back(0.0);
    for (int n = 0; n < cfg_.max_terms; ++n) {
        lc += std::log(gamma_ratio(1.0 + p_.a * (n * p_.m + p_.l), p_.a));
        log_c_.push_back(lc);
        if (lc + (n + 1) * log_r < -60.0 && n > 4) break;
    }
    // Radius where the sum of |terms| reaches the growth limit.
    const double limit = std::log(cfg_.series_growth_limit);
    if (p_.mb_ok() && series_log_growth(cfg_.r1) > limit) {
        double lo = 1e-3, hi = cfg_.r1;
        for (int it = 0; it < 60; ++it) {
            const double mid = std::sqrt(lo * hi);
            (series_log_growth(mid) > limit ? hi : lo) = mid;
        }
        r1_ = lo;
    } else {
        r1_ = cfg_.r1;
    }
}

KilbasSaigo::~KilbasSaigo() = default;

double KilbasSaigo::series_log_growth(double r) const {
    const double lr = std::log(r);
    double s = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < log_c_.size(); ++n) s = log_add(s, log_c_[n] + double(n) * lr);
    if (log_c_.size() >= std::size_t(cfg_.max_terms)) return std::numeric_limits<double>::infinity();
    return s;
}

Complex KilbasSaigo::log_kernel(Complex s) const {
    if (!dg_) throw DomainError("Mellin-Barnes: requires a < 1 and l > m - 1/a");
    const double phi = p_.phi();
    const double shift = p_.a * p_.tau();
    Complex num;
    try {
        num = dg_->log_g(phi - s);
    } catch (const PoleError&) {
        // A zero of G(phi - s) on the contour: the integrand vanishes at this node.
        return {-std::numeric_limits<double>::infinity(), 0.0};
    }
    return std::log(kPi) - log_sin_pi(s) + num - dg_->log_g(phi + shift - s);
}

std::shared_ptr<KilbasSaigo::Kernel> KilbasSaigo::kernel(double c, double h) const {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& k : kernels_)
        if (k->c == c && k->h == h) return k;
    if (kernels_.size() >= 16) kernels_.erase(kernels_.begin());
    auto k = std::make_shared<Kernel>();
    k->c = c;
    k->h = h;
    k->values = std::make_shared<const std::vector<Complex>>();
    kernels_.push_back(k);
    return k;
}

std::shared_ptr<const std::vector<Complex>> KilbasSaigo::nodes(Kernel& k, std::size_t n) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (k.values->size() >= n) return k.values;
    auto grown = std::make_shared<std::vector<Complex>>(*k.values);
    const std::size_t target = std::min(kMaxNodes, std::max(n, grown->size() + kNodeChunk));
    grown->reserve(target);
    for (std::size_t j = grown->size(); j < target; ++j) grown->push_back(log_kernel(Complex(k.c, double(j) * k.h)));
    k.values = grown;
    return k.values;
}

KSResult KilbasSaigo::integrate(Complex w, double c, double h, double fixed_H, double tol) const {
    check_sector(w);
    auto ker = kernel(c, h);
    const Complex lw = std::log(w);
    const double decay = kPi * (1.0 - 0.5 * p_.a) - std::abs(std::arg(w));
    const double pref = std::exp(log_pref_) * h / (2.0 * kPi);
    const std::size_t fixed_j = fixed_H > 0.0 ? std::size_t(std::llround(fixed_H / h)) : 0;

    auto values = nodes(*ker, std::max<std::size_t>(kNodeChunk, fixed_j + 2));
    auto f_plus = [&](std::size_t j) {
        const Complex s(c, double(j) * h);
        return std::exp((*values)[j] - s * lw);
    };
    auto f_minus = [&](std::size_t j) {
        const Complex s(c, -double(j) * h);
        return std::exp(std::conj((*values)[j]) - s * lw);
    };

    Complex sum = f_plus(0);
    const std::size_t lag = std::max<std::size_t>(1, std::size_t(std::ceil(1.0 / h)));
    std::vector<double> mags{std::abs(sum)};
    double tail = std::numeric_limits<double>::infinity();
    std::size_t j = 1;
    for (;; ++j) {
        if (j >= values->size()) {
            if (values->size() >= kMaxNodes) throw ConvergenceError("Mellin-Barnes: contour height cap reached");
            values = nodes(*ker, values->size() * 2);
        }
        const Complex fp = f_plus(j), fm = f_minus(j);
        sum += fp + fm;
        const double mag = std::abs(fp) + std::abs(fm);
        mags.push_back(mag);
        bool stop = false;
        if (j >= lag) {
            const double prev = mags[j - lag];
            double rate = decay;
            if (prev > 0.0 && mag > 0.0) rate = std::min(decay, std::log(prev / mag) / (double(lag) * h));
            if (mag == 0.0) {
                tail = 0.0;
            } else if (rate > 0.05 * decay) {
                const double q = std::exp(-rate * h);
                tail = pref * mag * q / (1.0 - q);
            } else {
                tail = std::numeric_limits<double>::infinity();
            }
            const double target = 0.1 * tol * std::max(std::abs(pref * sum), 1e-300);
            if (fixed_j == 0) stop = tail <= target;
            if (fixed_j != 0 && j >= fixed_j) {
                if (!(tail <= 10.0 * target))
                    throw RangeError("Mellin-Barnes: tail beyond the contour height exceeds tol");
                stop = true;
            }
        } else if (fixed_j != 0 && j >= fixed_j) {
            throw RangeError("Mellin-Barnes: contour height too short for a tail bound");
        }
        if (stop) break;
    }

    KSResult res;
    res.value = pref * sum;
    if (w.imag() == 0.0) res.value.imag(0.0);
    res.regime = Regime::MellinBarnes;
    res.terms = int(2 * j + 1);
    res.est_error = tail + kEps * std::abs(res.value) * std::sqrt(double(res.terms));
    return res;
}

KSResult KilbasSaigo::mellin_barnes(Complex w) const {
    MBContourCfg c = cfg_.contour;
    c.tol = cfg_.tol;
    return mellin_barnes(w, c);
}

KSResult KilbasSaigo::mellin_barnes(Complex w, const MBContourCfg& cfg) const {
    if (!p_.mb_ok()) throw DomainError("Mellin-Barnes: requires a < 1 and l > m - 1/a");
    check_sector(w);
    if (!(cfg.tol > 0.0)) throw InvalidArgument("MBContourCfg: tol must be positive");
    const double eps = p_.strip();
    const double c = cfg.abscissa > 0.0 ? cfg.abscissa : 0.5 * eps;
    if (!(c > 0.0 && c < eps)) throw InvalidArgument("MBContourCfg: abscissa must lie in (0, epsilon)");
    double h;
    double H = 0.0;
    if (cfg.half_height > 0.0) {
        if (cfg.n_nodes < 3) throw InvalidArgument("MBContourCfg: n_nodes must be >= 3");
        H = cfg.half_height;
        h = 2.0 * H / double(cfg.n_nodes - 1);
    } else {
        h = pick_h(0.9 * std::min(c, eps - c), cfg.tol, log_span(cfg_.r2, w));
    }
    if (w.imag() < 0.0) {
        KSResult r = integrate(std::conj(w), c, h, H, cfg.tol);
        r.value = std::conj(r.value);
        return r;
    }
    return integrate(w, c, h, H, cfg.tol);
}

KSResult KilbasSaigo::mellin_barnes_shifted(Complex w) const {
    if (!p_.mb_ok()) throw DomainError("Mellin-Barnes: requires a < 1 and l > m - 1/a");
    check_sector(w);
    const AsymptoticOrder o = ks_asymptotic_order(p_);
    const double d = 0.9 * (o.delta - 1.0);
    const double h = pick_h(d, cfg_.tol, log_span(cfg_.r2, w));
    const bool flip = w.imag() < 0.0;
    const Complex wp = flip ? std::conj(w) : w;
    // The remainder integral is O(|w|^-delta) while the residue term is
    // O(1/|w|); the tolerance is relative to the total.
    const Complex lead = o.leading_coeff / wp;
    KSResult r = integrate(wp, o.delta, h, 0.0, cfg_.tol);
    const double rel = std::abs(r.value) > 0.0 ? std::abs(lead) / std::abs(r.value) : 1.0;
    if (rel > 1.0) {
        // Tighten so the absolute error stays tol relative to |E|.
        r = integrate(wp, o.delta, h, 0.0, cfg_.tol / std::min(rel, 1e12));
    }
    r.value += lead;
    if (wp.imag() == 0.0) r.value.imag(0.0);
    if (flip) r.value = std::conj(r.value);
    r.regime = Regime::Asymptotic;
    return r;
}

AsymptoticValue KilbasSaigo::asymptotic(Complex w) const { return ks_asymptotic(w, p_); }

KSResult KilbasSaigo::series(Complex z) const {
    return ks_series_detail(z, p_, cfg_.tol, cfg_.max_terms, cfg_.max_bits);
}

KSResult KilbasSaigo::eval(Complex z) const {
    if (z.imag() < 0.0) {
        KSResult r = eval(std::conj(z));
        r.value = std::conj(r.value);
        return r;
    }
    if (p_.a == 1.0 && p_.m == 1.0 && p_.l == 0.0) {
        KSResult r;
        r.value = std::exp(z);
        if (z.imag() == 0.0) r.value.imag(0.0);
        r.est_error = kEps * std::abs(r.value);
        return r;
    }
    const double r = std::abs(z);
    if (r <= r1_) return series(z);
    const Complex w = -z;
    if (p_.mb_ok() && w.real() > 0.0) return r <= cfg_.r2 ? mellin_barnes(w) : mellin_barnes_shifted(w);
    try {
        return series(z);
    } catch (const NumericError& e) {
        throw DomainError(std::string("ks_eval: unsupported region (") + e.what() + ")");
    }
}

// ----------------------------------------------------------------------------

namespace {

std::shared_ptr<const KilbasSaigo> shared_evaluator(const KSParams& p, double tol) {
    static std::mutex mu;
    static std::map<std::tuple<double, double, double, double>, std::shared_ptr<const KilbasSaigo>> cache;
    const auto key = std::make_tuple(p.a, p.m, p.l, tol);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    KSEvalCfg cfg;
    cfg.tol = tol;
    cfg.contour.tol = tol;
    auto ev = std::make_shared<const KilbasSaigo>(p, cfg);
    std::lock_guard<std::mutex> lock(mu);
    if (cache.size() >= 64) cache.clear();
    return cache.emplace(key, ev).first->second;
}

}  // namespace

Complex ks_mellin_barnes(Complex z, const KSParams& p, const MBContourCfg& cfg) {
    p.validate();
    return shared_evaluator(p, cfg.tol)->mellin_barnes(z, cfg).value;
}

Complex ks_eval(Complex z, const KSParams& p, double tol) { return ks_eval_detail(z, p, tol).value; }

KSResult ks_eval_detail(Complex z, const KSParams& p, double tol) {
    p.validate();
    if (!(tol > 0.0)) throw InvalidArgument("ks_eval: tol must be positive");
    return shared_evaluator(p, tol)->eval(z);
}

}  // namespace ksdiff
