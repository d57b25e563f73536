#include "ksdiff/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "ksdiff/double_gamma.hpp"
#include "ksdiff/errors.hpp"
#include "ksdiff/fracops.hpp"
#include "ksdiff/kilbas_saigo.hpp"
#include "ksdiff/pearson_spectral.hpp"
#include "ksdiff/stochastic_sim.hpp"
#include "output.hpp"
#include "verify.hpp"

namespace ksdiff::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 20240601;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string quote_arg(const std::string& a) {
    if (!a.empty() && a.find_first_of(" \t\"'\\$`") == std::string::npos) return a;
    std::string q = "'";
    for (char c : a) {
        if (c == '\'')
            q += "'\\''";
        else
            q += c;
    }
    return q + "'";
}

std::uint64_t parse_seed(const std::string& s, const std::string& source) {
    const std::string t = trim(s);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw UsageError(source + ": seed must be a non-negative integer, got '" + s + "'");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (errno == ERANGE) throw UsageError(source + ": seed does not fit in 64 bits");
    return v;
}

Complex parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    try {
        std::size_t pos = 0;
        const double re = std::stod(s.substr(0, comma), &pos);
        double im = 0.0;
        if (comma != std::string::npos) im = std::stod(s.substr(comma + 1));
        return {re, im};
    } catch (const std::exception&) {
        throw UsageError("complex point must be 're' or 're,im', got '" + s + "'");
    }
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw UsageError("grid size must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

struct ModelOpts {
    std::string model = "ou";
    double theta = 1.0;
    double mu = 0.0;
    double sigma2 = 1.0;
    double a = 2.0;
    double b = 3.0;

    void add(CLI::App* c) {
        c->add_option("--model", model, "ou | cir | jacobi")->check(CLI::IsMember({"ou", "cir", "jacobi"}));
        c->add_option("--theta", theta, "mean-reversion rate");
        c->add_option("--mu", mu, "OU mean");
        c->add_option("--sigma2", sigma2, "OU stationary variance");
        c->add_option("--a", a, "CIR rate / Jacobi first exponent");
        c->add_option("--b", b, "CIR shape / Jacobi second exponent");
    }
    PearsonModel build() const {
        PearsonModel m = model == "ou"    ? PearsonModel::ou(theta, mu, sigma2)
                         : model == "cir" ? PearsonModel::cir(theta, a, b)
                                          : PearsonModel::jacobi(theta, a, b);
        m.validate();
        return m;
    }
    void record(Meta& meta) const {
        meta.parameters["model"] = build().describe();
    }
};

double model_mean(const PearsonModel& m) {
    switch (m.kind) {
    case ModelKind::OU: return m.p1;
    case ModelKind::CIR: return m.p2 / m.p1;
    case ModelKind::Jacobi: return (m.p2 - m.p1) / (m.p1 + m.p2 + 2.0);
    }
    return 0.0;
}

/// Default plotting window inside the state space.
std::pair<double, double> model_window(const PearsonModel& m) {
    switch (m.kind) {
    case ModelKind::OU: {
        const double s = std::sqrt(m.p2);
        return {m.p1 - 4.0 * s, m.p1 + 4.0 * s};
    }
    case ModelKind::CIR: {
        const double mean = m.p2 / m.p1, sd = std::sqrt(m.p2) / m.p1;
        return {1e-3 * mean, mean + 6.0 * sd};
    }
    case ModelKind::Jacobi: return {-0.99, 0.99};
    }
    return {0.0, 1.0};
}

std::string num(double v) { return format_double(v); }

// ---------------------------------------------------------------------------

struct KsEvalCmd {
    double a = 0.5, m = 1.0, l = 0.0, tol = 1e-12;
    std::vector<double> xs;
    std::vector<std::string> zs;
    double zmin = 0.0, zmax = 0.0;
    int n = 0;

    void add(CLI::App* c) {
        c->add_option("--a", a, "KS parameter a in (0,1]");
        c->add_option("--m", m, "KS parameter m > 0");
        c->add_option("--l", l, "KS parameter l > -1/a");
        c->add_option("--x", xs, "real evaluation points")->delimiter(',');
        c->add_option("--z", zs, "complex point 're,im' (repeatable)");
        c->add_option("--zmin", zmin, "real grid start");
        c->add_option("--zmax", zmax, "real grid end");
        c->add_option("--n", n, "real grid size");
        c->add_option("--tol", tol, "requested relative accuracy");
    }
    Table run(Meta& meta) const {
        const KSParams p{a, m, l};
        p.validate();
        if (!(tol > 0.0)) throw UsageError("--tol must be positive");
        std::vector<Complex> pts;
        for (double x : xs) pts.emplace_back(x, 0.0);
        for (const auto& z : zs) pts.push_back(parse_complex(z));
        if (n > 0)
            for (double x : linspace(zmin, zmax, n)) pts.emplace_back(x, 0.0);
        if (pts.empty()) throw UsageError("ks-eval: give --x, --z or a grid (--zmin --zmax --n)");
        KSEvalCfg cfg;
        cfg.tol = tol;
        const KilbasSaigo ev(p, cfg);
        meta.tolerances["ks_tol"] = tol;
        meta.parameters = {{"a", num(a)}, {"m", num(m)}, {"l", num(l)}};
        Table t;
        t.columns = {"re_z", "im_z", "re_E", "im_E", "regime", "est_error", "terms", "precision_bits"};
        for (const Complex z : pts) {
            const KSResult r = ev.eval(z);
            t.add({z.real(), z.imag(), r.value.real(), r.value.imag(), to_string(r.regime), r.est_error,
                   (long long)r.terms, (long long)r.precision});
        }
        return t;
    }
};

struct DgammaCmd {
    double tau = 1.0, tol = 1e-10, xmin = 0.5, xmax = 5.0;
    std::vector<std::string> zs;
    int n = 0;
    std::string method = "auto";

    void add(CLI::App* c) {
        c->add_option("--tau", tau, "tau > 0");
        c->add_option("--z", zs, "complex point 're,im' (repeatable)");
        c->add_option("--xmin", xmin, "real grid start");
        c->add_option("--xmax", xmax, "real grid end");
        c->add_option("--n", n, "real grid size");
        c->add_option("--method", method, "auto | product | stirling")
            ->check(CLI::IsMember({"auto", "product", "stirling"}));
        c->add_option("--tol", tol, "truncation tolerance");
    }
    Table run(Meta& meta) const {
        DoubleGammaCfg cfg;
        cfg.tau = tau;
        cfg.tol = tol;
        cfg.validate();
        std::vector<Complex> pts;
        for (const auto& z : zs) pts.push_back(parse_complex(z));
        if (n > 0)
            for (double x : linspace(xmin, xmax, n)) pts.emplace_back(x, 0.0);
        if (pts.empty()) throw UsageError("dgamma: give --z or a grid (--xmin --xmax --n)");
        const DoubleGamma g(cfg);
        meta.tolerances["dgamma_tol"] = tol;
        meta.tolerances["stirling_threshold"] = cfg.stirling_threshold;
        meta.parameters = {{"tau", num(tau)}, {"method", method}};
        Table t;
        t.columns = {"re_z", "im_z", "re_logG", "im_logG", "re_G", "im_G"};
        for (const Complex z : pts) {
            const Complex lg = method == "product"    ? g.log_g_product(z)
                               : method == "stirling" ? g.log_g_stirling(z)
                                                      : g.log_g(z);
            const Complex v = std::exp(lg);
            t.add({z.real(), z.imag(), lg.real(), lg.imag(), v.real(), v.imag()});
        }
        return t;
    }
};

struct CaputoCmd {
    double alpha = 0.5, gamma = 0.0, kappa = 1.0, T = 1.0, p = 1.0, origin_value = 0.0, tol = 0.0;
    int n = 257;
    std::string function = "eigen", origin = "zero";

    void add(CLI::App* c) {
        c->add_option("--alpha", alpha, "order alpha in (0,1]");
        c->add_option("--gamma", gamma, "stretch gamma >= 0");
        c->add_option("--kappa", kappa, "eigenvalue for --function eigen");
        c->add_option("--T", T, "time horizon");
        c->add_option("--n", n, "number of grid nodes (including t = 0)");
        c->add_option("--function", function, "eigen | power")->check(CLI::IsMember({"eigen", "power"}));
        c->add_option("--p", p, "exponent for --function power");
        c->add_option("--origin", origin, "zero | extrapolate | value")
            ->check(CLI::IsMember({"zero", "extrapolate", "value"}));
        c->add_option("--origin-value", origin_value, "value reported at t = 0 with --origin value");
        c->add_option("--tol", tol, "coarse-grid warning threshold (0 disables)");
    }
    Table run(Meta& meta) const {
        const StretchedOrder ord{alpha, gamma};
        ord.validate();
        if (n < 3) throw UsageError("caputo: --n must be >= 3");
        if (!(T > 0.0)) throw UsageError("caputo: --T must be positive");
        if (function == "power" && !(p >= 0.0)) throw UsageError("caputo: --p must be >= 0");
        const auto ts = linspace(0.0, T, n);
        std::vector<double> f(ts.size()), exact(ts.size());
        const PowerRule pr = function == "power" ? power_rule(p, ord) : PowerRule{};
        for (std::size_t j = 0; j < ts.size(); ++j) {
            if (function == "eigen") {
                f[j] = first_order_solution(kappa, ord, ts[j]);
                exact[j] = -kappa * f[j];
            } else {
                f[j] = std::pow(ts[j], p);
                exact[j] = ts[j] == 0.0 ? std::numeric_limits<double>::quiet_NaN() : pr.coeff * std::pow(ts[j], pr.exponent);
            }
        }
        CaputoOptions opt;
        opt.origin = origin == "zero" ? OriginRule::Zero : origin == "extrapolate" ? OriginRule::Extrapolate : OriginRule::Value;
        opt.origin_value = origin_value;
        opt.tol = tol;
        const CaputoResult r = apply_stretched_caputo(f, T, ord, opt);
        meta.tolerances["coarse_tol"] = tol;
        meta.parameters = {{"alpha", num(alpha)},     {"gamma", num(gamma)},
                           {"function", function},     {"est_error", num(r.est_error)},
                           {"coarse_warning", r.coarse_warning ? "true" : "false"}};
        Table t;
        t.columns = {"t", "f", "Df", "exact", "abs_error"};
        for (std::size_t j = 0; j < ts.size(); ++j) t.add({ts[j], f[j], r.values[j], exact[j], std::abs(r.values[j] - exact[j])});
        return t;
    }
};

struct SolveCmd {
    ModelOpts mo;
    std::string kind = "stretched", direction = "backward", initial;
    double alpha = 0.5, gamma = 0.0, A = 1.0, B = 1.0, y0 = std::numeric_limits<double>::quiet_NaN();
    double xmin = std::numeric_limits<double>::quiet_NaN(), xmax = std::numeric_limits<double>::quiet_NaN();
    double ks_tol = 1e-12;
    int N = 40, nx = 41;
    std::vector<double> coeffs, ts;

    void add(CLI::App* c) {
        mo.add(c);
        c->add_option("--kind", kind, "stretched | hyperbolic")->check(CLI::IsMember({"stretched", "hyperbolic"}));
        c->add_option("--direction", direction, "backward | forward")->check(CLI::IsMember({"backward", "forward"}));
        c->add_option("--alpha", alpha, "order alpha");
        c->add_option("--gamma", gamma, "stretch gamma (alpha + gamma <= 1)");
        c->add_option("--A", A, "coefficient of the squared operator (hyperbolic)");
        c->add_option("--B", B, "coefficient of the first-order operator (hyperbolic)");
        c->add_option("--N", N, "number of spectral modes for built-in initial conditions");
        c->add_option("--coeffs", coeffs, "spectral coefficients a_0,a_1,...")->delimiter(',');
        c->add_option("--initial", initial, "built-in initial condition: modeK | identity | square | delta");
        c->add_option("--y0", y0, "starting point for --initial delta");
        c->add_option("--t", ts, "output times")->delimiter(',');
        c->add_option("--xmin", xmin, "space grid start");
        c->add_option("--xmax", xmax, "space grid end");
        c->add_option("--nx", nx, "space grid size");
        c->add_option("--ks-tol", ks_tol, "KS evaluation tolerance");
    }
    SpectralCoeffs initial_coeffs(const PearsonModel& model, CoeffKind ck) const {
        if (!coeffs.empty() && !initial.empty()) throw UsageError("solve: give either --coeffs or --initial");
        SpectralCoeffs c;
        c.kind = ck;
        if (!coeffs.empty()) {
            c.values = coeffs;
            return c;
        }
        if (initial.empty()) throw UsageError("solve: an initial condition (--coeffs or --initial) is required");
        if (N < 1 || N > kMaxPolyDegree) throw UsageError("solve: --N out of range");
        if (initial.rfind("mode", 0) == 0) {
            int k = -1;
            try {
                k = std::stoi(initial.substr(4));
            } catch (const std::exception&) {
            }
            if (k < 0 || k > kMaxPolyDegree) throw UsageError("solve: --initial modeK needs an integer K >= 0");
            c.values.assign(std::size_t(k) + 1, 0.0);
            c.values[std::size_t(k)] = 1.0;
            return c;
        }
        if (initial == "delta") {
            if (ck != CoeffKind::Forward) throw UsageError("solve: --initial delta needs --direction forward");
            if (!std::isfinite(y0)) throw UsageError("solve: --initial delta needs --y0");
            if (!model.in_state_space(y0)) throw UsageError("solve: --y0 outside the state space");
            c.values = orthonormal_polys(model, N, y0);
            return c;
        }
        if (initial == "identity") return project_initial(model, [](double x) { return x; }, N, ck);
        if (initial == "square") return project_initial(model, [](double x) { return x * x; }, N, ck);
        throw UsageError("solve: unknown --initial '" + initial + "'");
    }
    Table run(Meta& meta) const {
        const PearsonModel model = mo.build();
        const StretchedOrder ord{alpha, gamma};
        ord.validate(true);
        if (kind == "hyperbolic") TelegraphCoeffs{A, B, 1.0}.validate();
        if (ts.empty()) throw UsageError("solve: --t is required");
        for (double t : ts)
            if (!(t >= 0.0)) throw UsageError("solve: times must be >= 0");
        if (nx < 1) throw UsageError("solve: --nx must be >= 1");
        const CoeffKind ck = direction == "backward" ? CoeffKind::Backward : CoeffKind::Forward;
        const SpectralCoeffs c = initial_coeffs(model, ck);
        auto [lo, hi] = model_window(model);
        if (std::isfinite(xmin)) lo = xmin;
        if (std::isfinite(xmax)) hi = xmax;
        const auto xs = linspace(lo, hi, nx);
        for (double x : xs)
            if (!model.in_state_space(x)) throw UsageError("solve: space grid leaves the state space");
        mo.record(meta);
        meta.tolerances["ks_tol"] = ks_tol;
        meta.parameters["kind"] = kind;
        meta.parameters["direction"] = direction;
        meta.parameters["alpha"] = num(alpha);
        meta.parameters["gamma"] = num(gamma);
        if (kind == "hyperbolic") {
            meta.parameters["A"] = num(A);
            meta.parameters["B"] = num(B);
        }
        meta.parameters["modes"] = std::to_string(c.N());
        Table t;
        t.columns = {"t", "x", "value"};
        for (double tt : ts) {
            const TemporalModes modes = kind == "stretched" ? stretched_modes(model, ord, tt, ks_tol)
                                                            : hyperbolic_modes(model, ord, A, B, tt, ks_tol);
            for (double x : xs) t.add({tt, x, solve_with_modes(model, modes, c, ck, x)});
        }
        return t;
    }
};

struct SimulateCmd {
    ModelOpts mo;
    std::string quantity, method = "subordinator";
    double alpha = 0.5, gamma = 0.0, t = 1.0, lambda = 1.0, dt = 1e-3, em_dt = 1e-4;
    double x0 = std::numeric_limits<double>::quiet_NaN();
    int paths = 10000, n_beta = 200, workers = 1;
    bool summary = false;
    CLI::Option* model_opt = nullptr;

    void add(CLI::App* c) {
        mo.add(c);
        model_opt = c->get_option("--model");
        c->add_option("--quantity", quantity, "x | z | laplace (default: x with --model, else z)")
            ->check(CLI::IsMember({"x", "z", "laplace"}));
        c->add_option("--method", method, "Z sampler: subordinator | beta")->check(CLI::IsMember({"subordinator", "beta"}));
        c->add_option("--alpha", alpha, "order alpha in (0,1)");
        c->add_option("--gamma", gamma, "stretch gamma >= 0");
        c->add_option("--t", t, "time");
        c->add_option("--lambda", lambda, "Laplace variable for --quantity laplace");
        c->add_option("--paths", paths, "number of paths");
        c->add_option("--dt", dt, "subordinator grid step");
        c->add_option("--n-beta-factors", n_beta, "beta-product truncation");
        c->add_option("--workers", workers, "worker threads");
        c->add_option("--em-dt", em_dt, "Euler step for the Jacobi model");
        c->add_option("--x0", x0, "starting point (default: stationary mean)");
        c->add_flag("--summary", summary, "print mean and standard error only");
    }
    MCConfig config(std::uint64_t seed) const {
        MCConfig c;
        c.n_paths = paths;
        c.dt = dt;
        c.seed = seed;
        c.n_beta_factors = n_beta;
        c.n_workers = workers;
        c.em_dt = em_dt;
        c.validate();
        return c;
    }
    Table run(Meta& meta) const {
        const MCConfig cfg = config(meta.seed);
        const std::string q = !quantity.empty() ? quantity : (model_opt->count() > 0 ? "x" : "z");
        const StretchedOrder ord{alpha, gamma};
        ord.validate();
        meta.tolerances["dt"] = dt;
        meta.tolerances["n_beta_factors"] = n_beta;
        meta.tolerances["em_dt"] = em_dt;
        meta.parameters = {{"quantity", q}, {"alpha", num(alpha)}, {"gamma", num(gamma)}, {"t", num(t)},
                           {"paths", std::to_string(paths)}};
        Table tab;
        if (q == "laplace") {
            const auto e = mc_laplace_transform(alpha, gamma, lambda, t, cfg);
            const double ref = first_order_solution(lambda, ord, t);
            tab.columns = {"alpha", "gamma", "lambda", "t", "mean", "stderr", "n", "reference", "z_score"};
            const double zs = e.stderr_ > 0.0 ? (e.mean - ref) / e.stderr_ : 0.0;
            tab.add({alpha, gamma, lambda, t, e.mean, e.stderr_, (long long)e.n, ref, zs});
            meta.parameters["lambda"] = num(lambda);
            return tab;
        }
        std::vector<double> v;
        if (q == "z") {
            if (!(alpha < 1.0)) throw UsageError("simulate: Z needs alpha < 1");
            const ZMethod zm = method == "beta" ? ZMethod::BetaProduct : ZMethod::SubordinatorIntegral;
            meta.parameters["method"] = to_string(zm);
            v = sample_Z_paths(alpha, gamma, cfg, zm);
        } else {
            const PearsonModel model = mo.build();
            mo.record(meta);
            const double start = std::isfinite(x0) ? x0 : model_mean(model);
            if (!model.in_state_space(start)) throw UsageError("simulate: --x0 outside the state space");
            meta.parameters["x0"] = num(start);
            v = sample_time_changed_pearson_paths(model, ord, t, start, cfg);
        }
        if (summary) {
            const auto e = summarize(v);
            tab.columns = {"quantity", "mean", "stderr", "n"};
            tab.add({q, e.mean, e.stderr_, (long long)e.n});
            return tab;
        }
        tab.columns = {"path", q};
        for (std::size_t i = 0; i < v.size(); ++i) tab.add({(long long)i, v[i]});
        return tab;
    }
};

struct TablesCmd {
    std::string table = "bounds";
    double a = 0.6, m = 1.5, l = 1.2;
    int n = 100;

    void add(CLI::App* c) {
        c->add_option("--table", table, "bounds | asymptotic-ratio")->check(CLI::IsMember({"bounds", "asymptotic-ratio"}));
        c->add_option("--a", a, "KS parameter a (asymptotic-ratio)");
        c->add_option("--m", m, "KS parameter m (asymptotic-ratio)");
        c->add_option("--l", l, "KS parameter l (asymptotic-ratio)");
        c->add_option("--n", n, "points per (a, m) pair (bounds)");
    }
    Table run(Meta& meta) const {
        Table t;
        meta.tolerances["ks_tol"] = 1e-12;
        meta.parameters["table"] = table;
        if (table == "bounds") {
            if (n < 2) throw UsageError("tables: --n must be >= 2");
            t.columns = {"a", "m", "x", "lower", "value", "upper", "inside"};
            for (double aa : {0.25, 0.5, 0.75})
                for (double mm : {0.5, 1.0, 2.0}) {
                    const KSParams p{aa, mm, mm - 1.0};
                    for (int i = 0; i < n; ++i) {
                        const double x = std::pow(10.0, -2.0 + 5.0 * i / (n - 1));
                        const double e = ks_eval(Complex(-x, 0.0), p).real();
                        const KSBounds b = ks_bounds(x, aa, mm);
                        t.add({aa, mm, x, b.lower, e, b.upper, e >= b.lower && e <= b.upper});
                    }
                }
            return t;
        }
        const KSParams p{a, m, l};
        p.validate();
        if (!p.mb_ok()) throw UsageError("tables: asymptotic-ratio needs a < 1 and l > m - 1/a");
        const AsymptoticOrder ord = ks_asymptotic_order(p);
        meta.parameters["a"] = num(a);
        meta.parameters["m"] = num(m);
        meta.parameters["l"] = num(l);
        t.columns = {"abs_z", "arg_z", "re_ratio", "im_ratio", "abs_ratio_minus_1", "delta"};
        for (double arg : {0.0, kPi / 4, -kPi / 4})
            for (int i = 0; i <= 6; ++i) {
                const double r = std::pow(10.0, 2.0 + 0.5 * i);
                const Complex w = std::polar(r, arg);
                const Complex ratio = ks_eval(-w, p) * w / ord.leading_coeff;
                t.add({r, arg, ratio.real(), ratio.imag(), std::abs(ratio - 1.0), ord.delta});
            }
        return t;
    }
};

struct VerifyCmd {
    std::string suite = "all";
    VerifyOptions opt;

    void add(CLI::App* c) {
        std::string names = "all";
        for (const auto& s : suite_names()) names += " | " + s;
        c->add_option("--suite", suite, names);
        c->add_option("--paths", opt.paths, "Monte Carlo paths per check");
        c->add_option("--workers", opt.workers, "worker threads");
        c->add_option("--dt", opt.dt, "subordinator grid step");
    }
};

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || trim(line.substr(0, eq)).empty())
            throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
        kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ksdiff: Kilbas-Saigo functions, stretched fractional operators and Pearson diffusions", "ksdiff"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", version());
    std::string config_path, output_path, format = "csv", seed_text;
    app.add_option("--config", config_path, "key=value file; explicit flags take precedence");
    app.add_option("--output,-o", output_path, "output file (default: standard output)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    CLI::Option* seed_opt = app.add_option("--seed", seed_text, "random seed (fallback: KSDIFF_SEED)");

    KsEvalCmd ks;
    DgammaCmd dg;
    CaputoCmd cap;
    SolveCmd sol;
    SimulateCmd sim;
    VerifyCmd ver;
    TablesCmd tab;
    auto* c_ks = app.add_subcommand("ks-eval", "evaluate E_{a,m,l}(z)");
    auto* c_dg = app.add_subcommand("dgamma", "evaluate log G(z; tau)");
    auto* c_cap = app.add_subcommand("caputo", "apply the discretized stretched Caputo operator");
    auto* c_sol = app.add_subcommand("solve", "spectral solution of the stretched or hyperbolic problem");
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo samples of Z or of the time-changed diffusion");
    auto* c_ver = app.add_subcommand("verify", "run verification suites; exit 4 on failure");
    auto* c_tab = app.add_subcommand("tables", "bound-sandwich and asymptotic-ratio tables");
    ks.add(c_ks);
    dg.add(c_dg);
    cap.add(c_cap);
    sol.add(c_sol);
    sim.add(c_sim);
    ver.add(c_ver);
    tab.add(c_tab);

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "ksdiff: " << e.what() << "\n";
        return kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    Meta meta;
    meta.command = sub->get_name();
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) meta.command_line += ' ';
        meta.command_line += i == 0 ? std::string("ksdiff") : quote_arg(args[i]);
    }

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw UsageError("cannot read config file '" + config_path + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            for (const auto& [key, value] : parse_config(ss.str())) {
                CLI::Option* o = sub->get_option_no_throw("--" + key);
                if (!o) o = app.get_option_no_throw("--" + key);
                if (!o || key == "config") throw UsageError("config: unknown key '" + key + "'");
                if (o->count() > 0) continue;
                try {
                    o->add_result(value);
                    o->run_callback();
                } catch (const CLI::Error& e) {
                    throw UsageError("config: " + key + ": " + e.what());
                }
            }
        }
        if (seed_opt->count() > 0) {
            meta.seed = parse_seed(seed_text, "--seed");
        } else if (const char* env = std::getenv("KSDIFF_SEED"); env && *env) {
            meta.seed = parse_seed(env, "KSDIFF_SEED");
        } else {
            meta.seed = kDefaultSeed;
        }
        const Format fmt = format == "json" ? Format::Json : Format::Csv;

        std::ostringstream buf;
        int code = kOk;
        if (sub == c_ver) {
            if (!is_suite(ver.suite)) throw UsageError("verify: unknown suite '" + ver.suite + "'");
            VerifyOptions vo = ver.opt;
            vo.seed = meta.seed;
            if (vo.paths < 2 || vo.workers < 1 || !(vo.dt > 0.0)) throw UsageError("verify: invalid Monte Carlo settings");
            meta.parameters["suite"] = ver.suite;
            meta.parameters["paths"] = std::to_string(vo.paths);
            meta.tolerances["dt"] = vo.dt;
            Report rep;
            run_suite(ver.suite, vo, rep);
            write_report(buf, meta, rep, fmt);
            if (!rep.passed()) code = kVerification;
        } else {
            Table t = sub == c_ks    ? ks.run(meta)
                      : sub == c_dg  ? dg.run(meta)
                      : sub == c_cap ? cap.run(meta)
                      : sub == c_sol ? sol.run(meta)
                      : sub == c_sim ? sim.run(meta)
                                     : tab.run(meta);
            write_table(buf, meta, t, fmt);
        }
        if (output_path.empty()) {
            out << buf.str();
        } else {
            std::ofstream f(output_path, std::ios::binary);
            if (!f) throw UsageError("cannot write output file '" + output_path + "'");
            f << buf.str();
        }
        return code;
    } catch (const UsageError& e) {
        err << "ksdiff: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidArgument& e) {
        err << "ksdiff: invalid argument: " << e.what() << "\n";
        return kUsage;
    } catch (const NumericError& e) {
        err << "ksdiff: numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        err << "ksdiff: error: " << e.what() << "\n";
        return kNumeric;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace ksdiff::cli
