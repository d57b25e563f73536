#include "ksdiff/pearson_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ksdiff/errors.hpp"

namespace ksdiff {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Three-term recurrence x q_n = b_{n+1} q_{n+1} + a_n q_n + b_n q_{n-1} in the model variable.
struct Recurrence {
    double a;  // diagonal a_n
    double b;  // off-diagonal b_n (b_0 unused)
};

Recurrence jacobi_coeffs(double a, double b, int n) {
    const double s = a + b;
    Recurrence r{};
    if (n == 0)
        r.a = (b - a) / (s + 2.0);
    else
        r.a = (b * b - a * a) / ((2.0 * n + s) * (2.0 * n + s + 2.0));
    if (n == 1) {
        r.b = 2.0 / (2.0 + s) * std::sqrt((1.0 + a) * (1.0 + b) / (3.0 + s));
    } else if (n > 1) {
        const double k = 2.0 * n + s;
        r.b = 2.0 / k * std::sqrt(n * (n + a) * (n + b) * (n + s) / ((k - 1.0) * (k + 1.0)));
    }
    return r;
}

Recurrence recurrence(const PearsonModel& m, int n) {
    switch (m.kind) {
        case ModelKind::OU: return {m.p1, std::sqrt(m.p2 * n)};
        case ModelKind::CIR: {
            const double nu = m.p2 - 1.0;
            return {(2.0 * n + nu + 1.0) / m.p1, n > 0 ? std::sqrt(n * (n + nu)) / m.p1 : 0.0};
        }
        case ModelKind::Jacobi: return jacobi_coeffs(m.p1, m.p2, n);
    }
    return {};
}

/// Sign so that Q_n has the conventional orientation: positive leading
/// coefficient for Hermite/Jacobi, (-1)^n for Laguerre.
double orientation(const PearsonModel& m, int n) { return (m.kind == ModelKind::CIR && (n % 2 == 1)) ? -1.0 : 1.0; }

void check_point(const PearsonModel& m, double x) {
    if (!m.in_state_space(x)) {
        std::ostringstream os;
        os << "point " << x << " outside the state space of " << m.describe();
        throw DomainError(os.str());
    }
}

double interp(const std::vector<double>& xs, const std::vector<double>& hs, double x) {
    if (x < xs.front() || x > xs.back()) return 0.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return hs.back();
    const std::size_t j = std::size_t(it - xs.begin());
    if (j == 0) return hs.front();
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - w) * hs[j - 1] + w * hs[j];
}

/// 1 / sum_{k<n} Q_k(x)^2, with rescaling so large nodes do not overflow.
/// Unlike the squared eigenvector component it keeps full relative accuracy
/// for the tiny weights at the outer nodes.
double christoffel_weight(const PearsonModel& m, int n, double x) {
    double prev = 0.0, cur = 1.0, sum = 1.0, log_scale = 0.0;  // values are exp(log_scale) * (prev, cur)
    for (int k = 0; k + 1 < n; ++k) {
        const Recurrence rk = recurrence(m, k), rk1 = recurrence(m, k + 1);
        const double next = ((x - rk.a) * cur - (k > 0 ? rk.b * prev : 0.0)) / rk1.b;
        prev = cur;
        cur = next;
        sum += cur * cur;
        if (std::abs(cur) > 1e100) {
            prev *= 1e-100;
            cur *= 1e-100;
            sum *= 1e-200;
            log_scale += 100.0 * std::log(10.0);
        }
    }
    return std::exp(-std::log(sum) - 2.0 * log_scale);
}

double upper_ks_bound(const StretchedOrder& ord, double x) {
    return ks_bounds(x, ord.alpha, 1.0 + ord.gamma / ord.alpha).upper;
}

}  // namespace

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::OU: return "ou";
        case ModelKind::CIR: return "cir";
        case ModelKind::Jacobi: return "jacobi";
    }
    return "unknown";
}

void PearsonModel::validate() const {
    if (!std::isfinite(theta) || !std::isfinite(p1) || !std::isfinite(p2))
        throw InvalidArgument("PearsonModel: non-finite parameter");
    if (!(theta > 0.0)) throw InvalidArgument("PearsonModel: theta must be positive");
    switch (kind) {
        case ModelKind::OU:
            if (!(p2 > 0.0)) throw InvalidArgument("PearsonModel: OU sigma2 must be positive");
            break;
        case ModelKind::CIR:
            if (!(p1 > 0.0) || !(p2 > 0.0)) throw InvalidArgument("PearsonModel: CIR a and b must be positive");
            break;
        case ModelKind::Jacobi:
            if (!(p1 > -1.0) || !(p2 > -1.0)) throw InvalidArgument("PearsonModel: Jacobi a and b must exceed -1");
            break;
    }
}

double PearsonModel::lower() const {
    switch (kind) {
        case ModelKind::OU: return -kInf;
        case ModelKind::CIR: return 0.0;
        case ModelKind::Jacobi: return -1.0;
    }
    return -kInf;
}

double PearsonModel::upper() const { return kind == ModelKind::Jacobi ? 1.0 : kInf; }

bool PearsonModel::in_state_space(double x) const { return std::isfinite(x) && x > lower() && x < upper(); }

double PearsonModel::drift(double x) const {
    switch (kind) {
        case ModelKind::OU: return -theta * (x - p1);
        case ModelKind::CIR: return -theta * (x - p2 / p1);
        case ModelKind::Jacobi: {
            const double s = p1 + p2 + 2.0;
            return theta * (p2 - p1 - s * x) / s;
        }
    }
    return 0.0;
}

double PearsonModel::diffusion(double x) const {
    switch (kind) {
        case ModelKind::OU: return theta * p2;
        case ModelKind::CIR: return theta * x / p1;
        case ModelKind::Jacobi: return theta * (1.0 - x * x) / (p1 + p2 + 2.0);
    }
    return 0.0;
}

double PearsonModel::diffusion_prime(double x) const {
    switch (kind) {
        case ModelKind::OU: return 0.0;
        case ModelKind::CIR: return theta / p1;
        case ModelKind::Jacobi: return -2.0 * theta * x / (p1 + p2 + 2.0);
    }
    return 0.0;
}

std::string PearsonModel::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case ModelKind::OU: os << "OU(theta=" << theta << ", mu=" << p1 << ", sigma2=" << p2 << ")"; break;
        case ModelKind::CIR: os << "CIR(theta=" << theta << ", a=" << p1 << ", b=" << p2 << ")"; break;
        case ModelKind::Jacobi: os << "Jacobi(theta=" << theta << ", a=" << p1 << ", b=" << p2 << ")"; break;
    }
    return os.str();
}

double stationary_density(const PearsonModel& model, double x) {
    model.validate();
    check_point(model, x);
    switch (model.kind) {
        case ModelKind::OU: {
            const double u = (x - model.p1);
            return std::exp(-u * u / (2.0 * model.p2)) / std::sqrt(2.0 * kPi * model.p2);
        }
        case ModelKind::CIR: {
            const double a = model.p1, b = model.p2;
            return std::exp(b * std::log(a) + (b - 1.0) * std::log(x) - a * x - std::lgamma(b));
        }
        case ModelKind::Jacobi: {
            const double a = model.p1, b = model.p2;
            const double lb = std::log(boost::math::beta(a + 1.0, b + 1.0)) + (a + b + 1.0) * std::log(2.0);
            return std::exp(a * std::log1p(-x) + b * std::log1p(x) - lb);
        }
    }
    return 0.0;
}

double eigenvalue(const PearsonModel& model, int n) {
    model.validate();
    if (n < 0) throw InvalidArgument("eigenvalue: n must be >= 0");
    if (model.kind == ModelKind::Jacobi) {
        const double s = model.p1 + model.p2;
        return model.theta * n * (n + s + 1.0) / (s + 2.0);
    }
    return model.theta * n;
}

std::vector<double> orthonormal_polys(const PearsonModel& model, int count, double x) {
    model.validate();
    check_point(model, x);
    if (count < 0 || count > kMaxPolyDegree + 1) throw InvalidArgument("orthonormal_polys: degree out of range");
    std::vector<double> q(std::size_t(std::max(count, 0)));
    if (count == 0) return q;
    q[0] = 1.0;
    double prev = 0.0, cur = 1.0;
    for (int n = 0; n + 1 < count; ++n) {
        const Recurrence rn = recurrence(model, n);
        const Recurrence rn1 = recurrence(model, n + 1);
        // The CIR recurrence runs in the orientation-free variable; signs are applied below.
        const double next = ((x - rn.a) * cur - (n > 0 ? rn.b * prev : 0.0)) / rn1.b;
        if (!std::isfinite(next) || std::abs(next) > 1e300)
            throw RangeError("orthonormal_poly: overflow at degree " + std::to_string(n + 1));
        prev = cur;
        cur = next;
        q[std::size_t(n + 1)] = cur;
    }
    for (int n = 0; n < count; ++n) q[std::size_t(n)] *= orientation(model, n);
    return q;
}

double orthonormal_poly(const PearsonModel& model, int n, double x) {
    if (n < 0) throw InvalidArgument("orthonormal_poly: n must be >= 0");
    return orthonormal_polys(model, n + 1, x)[std::size_t(n)];
}

const GaussRule& gauss_rule(const PearsonModel& model, int n) {
    model.validate();
    if (n < 1 || n > 4 * kMaxPolyDegree) throw InvalidArgument("gauss_rule: node count out of range");
    static std::mutex mu;
    static std::map<std::tuple<int, double, double, int>, std::unique_ptr<GaussRule>> cache;
    const auto key = std::make_tuple(int(model.kind), model.p1, model.p2, n);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    for (int k = 0; k < n; ++k) diag[k] = recurrence(model, k).a;
    for (int k = 1; k < n; ++k) sub[k - 1] = recurrence(model, k).b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (n == 1) {
        Eigen::MatrixXd m1(1, 1);
        m1(0, 0) = diag[0];
        es.compute(m1);
    } else {
        es.computeFromTridiagonal(diag, sub.head(n - 1));
    }
    if (es.info() != Eigen::Success) throw ConvergenceError("gauss_rule: eigen-decomposition failed");
    auto rule = std::make_unique<GaussRule>();
    rule->nodes.resize(std::size_t(n));
    rule->weights.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        double x = es.eigenvalues()[i];
        // Roundoff can push an extreme node onto the boundary.
        if (model.kind == ModelKind::CIR) x = std::max(x, std::numeric_limits<double>::min());
        if (model.kind == ModelKind::Jacobi) x = std::clamp(x, std::nextafter(-1.0, 0.0), std::nextafter(1.0, 0.0));
        rule->nodes[std::size_t(i)] = x;
        rule->weights[std::size_t(i)] = christoffel_weight(model, n, x);
    }
    return *cache.emplace(key, std::move(rule)).first->second;
}

std::vector<double> check_grid(const PearsonModel& model, int n) {
    model.validate();
    if (n < 2) throw InvalidArgument("check_grid: need at least 2 points");
    double lo = 0.0, hi = 0.0;
    switch (model.kind) {
        case ModelKind::OU: {
            const double s = std::sqrt(model.p2);
            lo = model.p1 - 3.0 * s;
            hi = model.p1 + 3.0 * s;
            break;
        }
        case ModelKind::CIR: {
            const double mean = model.p2 / model.p1, sd = std::sqrt(model.p2) / model.p1;
            lo = std::max(0.05 * mean, mean - 2.0 * sd);
            hi = mean + 3.0 * sd;
            break;
        }
        case ModelKind::Jacobi:
            lo = -0.9;
            hi = 0.9;
            break;
    }
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[std::size_t(i)] = lo + (hi - lo) * i / double(n - 1);
    return g;
}

SpectralCoeffs project_initial(const PearsonModel& model, const std::function<double(double)>& h, int N,
                               CoeffKind kind) {
    model.validate();
    if (N < 1 || N > kMaxPolyDegree + 1) throw InvalidArgument("project_initial: N out of range");
    const GaussRule& rule = gauss_rule(model, 2 * N);
    SpectralCoeffs c;
    c.kind = kind;
    c.values.assign(std::size_t(N), 0.0);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = rule.nodes[i];
        double hv = h(x);
        if (kind == CoeffKind::Forward) hv /= stationary_density(model, x);
        if (!std::isfinite(hv)) throw NumericError("project_initial: quadrature failure, h is not finite at a node");
        const auto q = orthonormal_polys(model, N, x);
        for (int n = 0; n < N; ++n) c.values[std::size_t(n)] += rule.weights[i] * hv * q[std::size_t(n)];
    }
    for (double a : c.values) c.parseval += a * a;
    c.check_grid = check_grid(model);
    for (double x : c.check_grid) {
        const auto q = orthonormal_polys(model, N, x);
        double s = 0.0;
        for (int n = 0; n < N; ++n) s += c.values[std::size_t(n)] * q[std::size_t(n)];
        if (kind == CoeffKind::Forward) s *= stationary_density(model, x);
        c.reconstruction_error = std::max(c.reconstruction_error, std::abs(s - h(x)));
    }
    return c;
}

SpectralCoeffs project_initial(const PearsonModel& model, const std::vector<double>& xs, const std::vector<double>& hs,
                               int N, CoeffKind kind) {
    if (xs.size() != hs.size() || xs.size() < 2) throw InvalidArgument("project_initial: sample size mismatch");
    if (!std::is_sorted(xs.begin(), xs.end())) throw InvalidArgument("project_initial: xs must be sorted");
    return project_initial(model, [&](double x) { return interp(xs, hs, x); }, N, kind);
}

namespace {

/// Caches factor(n) so repeated evaluations over a space grid reuse the KS values.
std::function<double(int)> memoize(std::function<double(int)> f) {
    struct Cache {
        std::mutex mu;
        std::vector<double> values;
        std::vector<char> known;
    };
    auto cache = std::make_shared<Cache>();
    return [f = std::move(f), cache](int n) {
        const std::size_t k = std::size_t(n);
        {
            std::lock_guard<std::mutex> lock(cache->mu);
            if (k < cache->known.size() && cache->known[k]) return cache->values[k];
        }
        const double v = f(n);
        std::lock_guard<std::mutex> lock(cache->mu);
        if (k >= cache->known.size()) {
            cache->values.resize(k + 1);
            cache->known.resize(k + 1, 0);
        }
        cache->values[k] = v;
        cache->known[k] = 1;
        return v;
    };
}

}  // namespace

TemporalModes classical_modes(const PearsonModel& model, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("classical_modes: t must be >= 0");
    TemporalModes m;
    m.factor = [model, t](int n) { return std::exp(-eigenvalue(model, n) * t); };
    m.envelope = m.factor;
    return m;
}

TemporalModes stretched_modes(const PearsonModel& model, const StretchedOrder& ord, double t, double ks_tol) {
    ord.validate(true);
    if (!(t >= 0.0)) throw InvalidArgument("stretched_modes: t must be >= 0");
    TemporalModes m;
    m.factor = memoize([model, ord, t, ks_tol](int n) {
        return n == 0 ? 1.0 : first_order_solution(eigenvalue(model, n), ord, t, ks_tol);
    });
    m.envelope = [model, ord, t](int n) { return upper_ks_bound(ord, eigenvalue(model, n) * std::pow(t, ord.beta())); };
    return m;
}

TemporalModes hyperbolic_modes(const PearsonModel& model, const StretchedOrder& ord, double A, double B, double t,
                               double ks_tol) {
    ord.validate(true);
    TelegraphCoeffs{A, B, 1.0}.validate();
    if (!(t >= 0.0)) throw InvalidArgument("hyperbolic_modes: t must be >= 0");
    TemporalModes m;
    m.factor = memoize([=](int n) { return hyperbolic_temporal_factor(model, ord, A, B, n, t, ks_tol); });
    m.envelope = [=](int n) {
        if (n == 0) return 1.0;
        if (A == 0.0) return upper_ks_bound(ord, eigenvalue(model, n) / B * std::pow(t, ord.beta()));
        return 2.0 * std::abs(hyperbolic_temporal_asymptotic(ord, A, B, eigenvalue(model, n), t));
    };
    return m;
}

SeriesGrid transition_density_grid(const PearsonModel& model, const TemporalModes& modes, const std::vector<double>& xs,
                                   double y, const SeriesCfg& cfg) {
    model.validate();
    check_point(model, y);
    if (cfg.N < 1 || cfg.N_max < cfg.N || cfg.N_max > kMaxPolyDegree)
        throw InvalidArgument("SeriesCfg: need 1 <= N <= N_max <= " + std::to_string(kMaxPolyDegree));
    std::vector<double> mx(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) mx[j] = stationary_density(model, xs[j]);
    std::vector<double> T;
    SeriesGrid g;
    int N = cfg.N;
    for (;;) {
        while (int(T.size()) < N + 1) T.push_back(modes.factor(int(T.size())));
        const auto qy = orthonormal_polys(model, N + 1, y);
        g.values.assign(xs.size(), 0.0);
        g.tail_bound = 0.0;
        const double env = modes.envelope(N);
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const auto qx = orthonormal_polys(model, N + 1, xs[j]);
            double s = 0.0;
            for (int n = 0; n < N; ++n) s += T[std::size_t(n)] * qx[std::size_t(n)] * qy[std::size_t(n)];
            g.values[j] = mx[j] * s;
            g.tail_bound = std::max(g.tail_bound, mx[j] * env * std::abs(qx[std::size_t(N)] * qy[std::size_t(N)]));
        }
        g.terms = N;
        if (g.tail_bound <= cfg.tol || !cfg.auto_increase || N >= cfg.N_max) break;
        N = std::min(2 * N, cfg.N_max);
    }
    g.truncation_warning = g.tail_bound > cfg.tol;
    return g;
}

namespace {

SeriesValue single(const SeriesGrid& g) {
    SeriesValue v;
    v.value = g.values.at(0);
    v.terms = g.terms;
    v.tail_bound = g.tail_bound;
    v.truncation_warning = g.truncation_warning;
    v.small_t_warning = g.small_t_warning;
    return v;
}

void require_positive_t(double t, const char* who) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument(std::string(who) + ": t must be positive");
}

}  // namespace

SeriesValue transition_density_classical(const PearsonModel& model, double x, double t, double y,
                                         const SeriesCfg& cfg) {
    require_positive_t(t, "transition_density_classical");
    return single(transition_density_grid(model, classical_modes(model, t), {x}, y, cfg));
}

SeriesValue transition_density_stretched(const PearsonModel& model, const StretchedOrder& ord, double x, double t,
                                         double y, const SeriesCfg& cfg) {
    require_positive_t(t, "transition_density_stretched");
    auto g = transition_density_grid(model, stretched_modes(model, ord, t, cfg.ks_tol), {x}, y, cfg);
    g.small_t_warning = t < cfg.t_min;
    return single(g);
}

SeriesValue transition_density_hyperbolic(const PearsonModel& model, const StretchedOrder& ord, double A, double B,
                                          double x, double t, double y, const SeriesCfg& cfg) {
    require_positive_t(t, "transition_density_hyperbolic");
    auto g = transition_density_grid(model, hyperbolic_modes(model, ord, A, B, t, cfg.ks_tol), {x}, y, cfg);
    g.small_t_warning = t < cfg.t_min;
    return single(g);
}

double ou_transition_density_exact(const PearsonModel& model, double x, double t, double y) {
    model.validate();
    if (model.kind != ModelKind::OU) throw InvalidArgument("ou_transition_density_exact: OU model required");
    require_positive_t(t, "ou_transition_density_exact");
    const double e = std::exp(-model.theta * t);
    const double mean = model.p1 + (y - model.p1) * e;
    const double var = model.p2 * (-std::expm1(-2.0 * model.theta * t));
    const double u = x - mean;
    return std::exp(-u * u / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
}

double solve_with_modes(const PearsonModel& model, const TemporalModes& modes, const SpectralCoeffs& coeffs,
                        CoeffKind expected, double point) {
    if (coeffs.kind != expected) throw InvalidArgument("spectral solve: coefficient kind does not match the problem");
    const int N = coeffs.N();
    const auto q = orthonormal_polys(model, N, point);
    double s = 0.0;
    for (int n = 0; n < N; ++n) {
        const double a = coeffs.values[std::size_t(n)];
        if (a != 0.0) s += a * modes.factor(n) * q[std::size_t(n)];
    }
    return expected == CoeffKind::Forward ? stationary_density(model, point) * s : s;
}

double solve_backward_stretched(const PearsonModel& model, const StretchedOrder& ord, const SpectralCoeffs& coeffs,
                                double t, double y, double ks_tol) {
    return solve_with_modes(model, stretched_modes(model, ord, t, ks_tol), coeffs, CoeffKind::Backward, y);
}

double solve_forward_stretched(const PearsonModel& model, const StretchedOrder& ord, const SpectralCoeffs& coeffs,
                               double t, double x, double ks_tol) {
    return solve_with_modes(model, stretched_modes(model, ord, t, ks_tol), coeffs, CoeffKind::Forward, x);
}

double solve_backward_hyperbolic(const PearsonModel& model, const StretchedOrder& ord, double A, double B,
                                 const SpectralCoeffs& coeffs, double t, double y, double ks_tol) {
    return solve_with_modes(model, hyperbolic_modes(model, ord, A, B, t, ks_tol), coeffs, CoeffKind::Backward, y);
}

double solve_forward_hyperbolic(const PearsonModel& model, const StretchedOrder& ord, double A, double B,
                                const SpectralCoeffs& coeffs, double t, double x, double ks_tol) {
    return solve_with_modes(model, hyperbolic_modes(model, ord, A, B, t, ks_tol), coeffs, CoeffKind::Forward, x);
}

double hyperbolic_temporal_factor(const PearsonModel& model, const StretchedOrder& ord, double A, double B, int n,
                                  double t, double ks_tol) {
    ord.validate(true);
    if (n < 0) throw InvalidArgument("hyperbolic_temporal_factor: n must be >= 0");
    if (!(t >= 0.0)) throw InvalidArgument("hyperbolic_temporal_factor: t must be >= 0");
    if (n == 0) {
        TelegraphCoeffs{A, B, 1.0}.validate();
        return 1.0;
    }
    return second_order_solution({A, B, eigenvalue(model, n)}, ord, t, ks_tol);
}

double hyperbolic_temporal_derivative(const PearsonModel& model, const StretchedOrder& ord, double A, double B, int n,
                                      double t, double ks_tol) {
    ord.validate(true);
    if (n < 0) throw InvalidArgument("hyperbolic_temporal_derivative: n must be >= 0");
    if (!(t >= 0.0)) throw InvalidArgument("hyperbolic_temporal_derivative: t must be >= 0");
    if (n == 0) return 0.0;
    const TelegraphCoeffs c{A, B, eigenvalue(model, n)};
    if (A == 0.0) {
        const double kappa = reduce_to_first_order(c);
        return -kappa * first_order_solution(kappa, ord, t, ks_tol);
    }
    const RootsAndWeights r = telegraph_roots(c);
    if (t == 0.0) return (r.K1 * r.a_star + r.K2 * r.b_star).real();
    const double tb = std::pow(t, ord.beta());
    const KSParams p = ord.ks();
    const Complex v1 = r.K1 * r.a_star * ks_eval(r.a_star * tb, p, ks_tol);
    if (r.conjugate) return 2.0 * v1.real();
    return (v1 + r.K2 * r.b_star * ks_eval(r.b_star * tb, p, ks_tol)).real();
}

double hyperbolic_temporal_asymptotic(const StretchedOrder& ord, double A, double B, double lambda, double t) {
    ord.validate(true);
    if (!(lambda > 0.0) || !(t > 0.0)) throw InvalidArgument("hyperbolic_temporal_asymptotic: lambda, t must be > 0");
    const double beta = ord.beta();
    const double L1 = 1.0 / std::tgamma(1.0 - ord.alpha);
    // 1/Gamma vanishes at the poles; boost::math::tgamma handles the sign.
    const double rg = (1.0 - ord.alpha - beta <= 0.0 && std::floor(1.0 - ord.alpha - beta) == 1.0 - ord.alpha - beta)
                          ? 0.0
                          : 1.0 / boost::math::tgamma(1.0 - ord.alpha - beta);
    const double L2 = -std::tgamma(1.0 - beta) * rg * L1;
    const double tb = std::pow(t, -beta);
    return ((A + B) * L1 * tb - A * L2 * tb * tb) / lambda;
}

ResidualNorms residual_check(const SolutionGrid& grid, const PearsonModel& model, const StretchedOrder& ord, double A,
                             double B, const ResidualOptions& opt) {
    model.validate();
    ord.validate();
    if (A < 0.0 || B < 0.0 || (A == 0.0 && B == 0.0)) throw InvalidArgument("residual_check: need A, B >= 0, not both 0");
    const std::size_t nt = grid.ts.size(), nx = grid.xs.size();
    if (nt < 4 || nx < 3) throw InvalidArgument("residual_check: grid too small");
    if (grid.values.size() != nt) throw InvalidArgument("residual_check: values/ts size mismatch");
    for (const auto& row : grid.values)
        if (row.size() != nx) throw InvalidArgument("residual_check: values/xs size mismatch");
    if (grid.ts[0] != 0.0) throw InvalidArgument("residual_check: ts must start at 0");
    if (!opt.initial_velocity.empty() && opt.initial_velocity.size() != nx)
        throw InvalidArgument("residual_check: initial_velocity size mismatch");
    const double T = grid.ts.back();
    const double dt = T / double(nt - 1);
    const double dx = (grid.xs.back() - grid.xs.front()) / double(nx - 1);
    for (std::size_t i = 0; i < nt; ++i)
        if (std::abs(grid.ts[i] - dt * double(i)) > 1e-9 * T) throw InvalidArgument("residual_check: ts must be uniform");
    for (std::size_t j = 0; j < nx; ++j) {
        if (std::abs(grid.xs[j] - grid.xs[0] - dx * double(j)) > 1e-9 * std::abs(grid.xs.back() - grid.xs[0]))
            throw InvalidArgument("residual_check: xs must be uniform");
        check_point(model, grid.xs[j]);
    }

    ResidualNorms res;
    // Time operators along each spatial column.
    std::vector<std::vector<double>> d1(nx), d2(nx);
    for (std::size_t j = 0; j < nx; ++j) {
        std::vector<double> col(nt);
        for (std::size_t i = 0; i < nt; ++i) col[i] = grid.values[i][j];
        CaputoOptions co;
        co.origin = OriginRule::Value;
        co.origin_value = opt.initial_velocity.empty() ? 0.0 : opt.initial_velocity[j];
        co.tol = opt.tol;
        auto r1 = apply_stretched_caputo(col, T, ord, co);
        res.coarse_warning = res.coarse_warning || r1.coarse_warning;
        d1[j] = std::move(r1.values);
        if (A != 0.0) {
            CaputoOptions c2;
            c2.tol = opt.tol;
            auto r2 = apply_stretched_caputo(d1[j], T, ord, c2);
            res.coarse_warning = res.coarse_warning || r2.coarse_warning;
            d2[j] = std::move(r2.values);
        }
    }
    double sq = 0.0;
    for (std::size_t i = 1; i < nt; ++i) {
        if (grid.ts[i] < opt.t_from - 1e-12 * T) continue;
        const auto& g = grid.values[i];
        for (std::size_t j = 1; j + 1 < nx; ++j) {
            double space = 0.0;
            const double xm = grid.xs[j - 1], x0 = grid.xs[j], xp = grid.xs[j + 1];
            if (opt.equation == Equation::Backward) {
                const double gx = (g[j + 1] - g[j - 1]) / (2.0 * dx);
                const double gxx = (g[j + 1] - 2.0 * g[j] + g[j - 1]) / (dx * dx);
                space = model.drift(x0) * gx + model.diffusion(x0) * gxx;
            } else {
                const double Dg = (model.diffusion(xp) * g[j + 1] - 2.0 * model.diffusion(x0) * g[j] +
                                   model.diffusion(xm) * g[j - 1]) / (dx * dx);
                const double mg = (model.drift(xp) * g[j + 1] - model.drift(xm) * g[j - 1]) / (2.0 * dx);
                space = Dg - mg;
            }
            const double time = (A != 0.0 ? A * d2[j][i] : 0.0) + B * d1[j][i];
            const double r = time - space;
            res.sup = std::max(res.sup, std::abs(r));
            sq += r * r;
            ++res.points;
        }
    }
    res.l2 = res.points > 0 ? std::sqrt(sq / res.points) : 0.0;
    return res;
}

}  // namespace ksdiff
