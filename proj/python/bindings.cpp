#include <algorithm>
#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ksdiff/double_gamma.hpp"
#include "ksdiff/errors.hpp"
#include "ksdiff/fracops.hpp"
#include "ksdiff/kilbas_saigo.hpp"
#include "ksdiff/pearson_spectral.hpp"
#include "ksdiff/stochastic_sim.hpp"

namespace py = pybind11;
using namespace ksdiff;

namespace {

void export_errors(py::module_& m) {
    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    auto numeric = py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<PoleError>(m, "PoleError", numeric.ptr());
    py::register_exception<DomainError>(m, "DomainError", numeric.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", numeric.ptr());
    py::register_exception<RangeError>(m, "RangeError", numeric.ptr());
    py::register_exception<DegenerateRootError>(m, "DegenerateRootError", numeric.ptr());
}

void export_special(py::module_& m) {
    py::class_<KSParams>(m, "KSParams")
        .def(py::init([](double a, double mm, double l) { return KSParams{a, mm, l}; }), py::arg("a"), py::arg("m"),
             py::arg("l"))
        .def_readwrite("a", &KSParams::a)
        .def_readwrite("m", &KSParams::m)
        .def_readwrite("l", &KSParams::l)
        .def_property_readonly("tau", &KSParams::tau)
        .def_property_readonly("phi", &KSParams::phi)
        .def("mb_ok", &KSParams::mb_ok)
        .def("validate", &KSParams::validate)
        .def("__repr__", [](const KSParams& p) {
            return "KSParams(a=" + std::to_string(p.a) + ", m=" + std::to_string(p.m) + ", l=" + std::to_string(p.l) + ")";
        });

    py::class_<KSResult>(m, "KSResult")
        .def_readonly("value", &KSResult::value)
        .def_property_readonly("regime", [](const KSResult& r) { return to_string(r.regime); })
        .def_readonly("est_error", &KSResult::est_error)
        .def_readonly("terms", &KSResult::terms)
        .def_readonly("precision", &KSResult::precision);

    m.def("ks_eval", py::vectorize([](Complex z, double a, double mm, double l, double tol) {
              return ks_eval(z, KSParams{a, mm, l}, tol);
          }),
          py::arg("z"), py::arg("a"), py::arg("m"), py::arg("l"), py::arg("tol") = 1e-12,
          "E_{a,m,l}(z), broadcast over array arguments.");
    m.def("ks_eval_detail", &ks_eval_detail, py::arg("z"), py::arg("params"), py::arg("tol") = 1e-12);
    m.def("ks_series", &ks_series, py::arg("z"), py::arg("params"), py::arg("tol") = 1e-12);
    m.def(
        "ks_mellin_barnes",
        [](Complex w, const KSParams& p, double tol) {
            MBContourCfg cfg;
            cfg.tol = tol;
            return ks_mellin_barnes(w, p, cfg);
        },
        py::arg("w"), py::arg("params"), py::arg("tol") = 1e-12, "E_{a,m,l}(-w) for Re w > 0.");
    m.def(
        "ks_asymptotic",
        [](Complex w, const KSParams& p) {
            const AsymptoticValue v = ks_asymptotic(w, p);
            return py::make_tuple(v.value, v.order.delta, v.order.leading_coeff);
        },
        py::arg("w"), py::arg("params"), "(leading value, delta, leading coefficient) of E(-w).");
    m.def("ks_coeff", &ks_coeff, py::arg("n"), py::arg("params"));
    m.def(
        "ks_bounds",
        [](double x, double a, double mm) {
            const KSBounds b = ks_bounds(x, a, mm);
            return py::make_tuple(b.lower, b.upper);
        },
        py::arg("x"), py::arg("a"), py::arg("m"));
    m.def(
        "log_double_gamma",
        [](Complex z, double tau) {
            DoubleGammaCfg cfg;
            cfg.tau = tau;
            return log_double_gamma(z, cfg);
        },
        py::arg("z"), py::arg("tau"));
}

void export_fracops(py::module_& m) {
    py::class_<StretchedOrder>(m, "StretchedOrder")
        .def(py::init([](double a, double g) { return StretchedOrder{a, g}; }), py::arg("alpha"), py::arg("gamma") = 0.0)
        .def_readwrite("alpha", &StretchedOrder::alpha)
        .def_readwrite("gamma", &StretchedOrder::gamma)
        .def_property_readonly("beta", &StretchedOrder::beta)
        .def("ks", &StretchedOrder::ks);

    m.def("first_order_solution", &first_order_solution, py::arg("kappa"), py::arg("order"), py::arg("t"),
          py::arg("tol") = 1e-12);
    m.def(
        "apply_stretched_caputo",
        [](const std::vector<double>& f, double T, const StretchedOrder& ord) {
            const CaputoResult r = apply_stretched_caputo(f, T, ord);
            return py::make_tuple(r.values, r.est_error, r.coarse_warning);
        },
        py::arg("samples"), py::arg("T"), py::arg("order"), "(values, est_error, coarse_warning) on t_j = j T/(n-1).");
    m.def(
        "telegraph_roots",
        [](double A, double B, double lambda) {
            const RootsAndWeights r = telegraph_roots({A, B, lambda});
            return py::make_tuple(r.a_star, r.b_star, r.K1, r.K2);
        },
        py::arg("A"), py::arg("B"), py::arg("lam"));
    m.def(
        "second_order_solution",
        [](double A, double B, double lambda, const StretchedOrder& ord, double t) {
            return second_order_solution({A, B, lambda}, ord, t);
        },
        py::arg("A"), py::arg("B"), py::arg("lam"), py::arg("order"), py::arg("t"));
    m.def("fibonacci_U", &fibonacci_U, py::arg("n"), py::arg("a"), py::arg("b"));
}

void export_pearson(py::module_& m) {
    py::class_<PearsonModel>(m, "PearsonModel")
        .def_static("ou", &PearsonModel::ou, py::arg("theta"), py::arg("mu"), py::arg("sigma2"))
        .def_static("cir", &PearsonModel::cir, py::arg("theta"), py::arg("a"), py::arg("b"))
        .def_static("jacobi", &PearsonModel::jacobi, py::arg("theta"), py::arg("a"), py::arg("b"))
        .def_property_readonly("kind", [](const PearsonModel& p) { return to_string(p.kind); })
        .def_readonly("theta", &PearsonModel::theta)
        .def("in_state_space", &PearsonModel::in_state_space)
        .def("describe", &PearsonModel::describe)
        .def("__repr__", &PearsonModel::describe);

    m.def("stationary_density", &stationary_density, py::arg("model"), py::arg("x"));
    m.def("eigenvalue", &eigenvalue, py::arg("model"), py::arg("n"));
    m.def("orthonormal_polys", &orthonormal_polys, py::arg("model"), py::arg("count"), py::arg("x"));
    m.def(
        "transition_density_stretched",
        [](const PearsonModel& model, const StretchedOrder& ord, double x, double t, double y, int N) {
            SeriesCfg cfg;
            cfg.N = N;
            cfg.N_max = std::max(N, cfg.N_max);
            return transition_density_stretched(model, ord, x, t, y, cfg).value;
        },
        py::arg("model"), py::arg("order"), py::arg("x"), py::arg("t"), py::arg("y"), py::arg("N") = 100);
    m.def("ou_transition_density_exact", &ou_transition_density_exact, py::arg("model"), py::arg("x"), py::arg("t"),
          py::arg("y"));
    m.def(
        "solve_backward_stretched",
        [](const PearsonModel& model, const StretchedOrder& ord, const std::vector<double>& coeffs, double t, double y) {
            SpectralCoeffs c;
            c.values = coeffs;
            return solve_backward_stretched(model, ord, c, t, y);
        },
        py::arg("model"), py::arg("order"), py::arg("coeffs"), py::arg("t"), py::arg("y"));
    m.def(
        "solve_backward_hyperbolic",
        [](const PearsonModel& model, const StretchedOrder& ord, double A, double B, const std::vector<double>& coeffs,
           double t, double y) {
            SpectralCoeffs c;
            c.values = coeffs;
            return solve_backward_hyperbolic(model, ord, A, B, c, t, y);
        },
        py::arg("model"), py::arg("order"), py::arg("A"), py::arg("B"), py::arg("coeffs"), py::arg("t"), py::arg("y"));
}

void export_stochastic(py::module_& m) {
    py::class_<MCConfig>(m, "MCConfig")
        .def(py::init([](int n_paths, double dt, std::uint64_t seed, int n_beta_factors, int n_workers) {
                 MCConfig c;
                 c.n_paths = n_paths;
                 c.dt = dt;
                 c.seed = seed;
                 c.n_beta_factors = n_beta_factors;
                 c.n_workers = n_workers;
                 c.validate();
                 return c;
             }),
             py::arg("n_paths") = 10000, py::arg("dt") = 1e-3, py::arg("seed") = 20240601,
             py::arg("n_beta_factors") = 200, py::arg("n_workers") = 1)
        .def_readwrite("n_paths", &MCConfig::n_paths)
        .def_readwrite("dt", &MCConfig::dt)
        .def_readwrite("seed", &MCConfig::seed)
        .def_readwrite("n_beta_factors", &MCConfig::n_beta_factors)
        .def_readwrite("n_workers", &MCConfig::n_workers);

    m.def(
        "mc_laplace_transform",
        [](double a, double g, double lambda, double t, const MCConfig& cfg) {
            py::gil_scoped_release release;
            const EstimateWithError e = mc_laplace_transform(a, g, lambda, t, cfg);
            return std::make_tuple(e.mean, e.stderr_, e.n);
        },
        py::arg("alpha"), py::arg("gamma"), py::arg("lam"), py::arg("t"), py::arg("cfg"), "(mean, stderr, n).");
    m.def(
        "sample_z",
        [](double a, double g, const MCConfig& cfg, const std::string& method) {
            if (method != "subordinator" && method != "beta")
                throw InvalidArgument("sample_z: method must be 'subordinator' or 'beta'");
            std::vector<double> z;
            {
                py::gil_scoped_release release;
                z = sample_Z_paths(a, g, cfg, method == "beta" ? ZMethod::BetaProduct : ZMethod::SubordinatorIntegral);
            }
            py::array_t<double> out(py::ssize_t(z.size()));
            std::copy(z.begin(), z.end(), out.mutable_data());
            return out;
        },
        py::arg("alpha"), py::arg("gamma"), py::arg("cfg"), py::arg("method") = "subordinator");
    m.def(
        "ks_two_sample",
        [](std::vector<double> a, std::vector<double> b) {
            const KSTest t = ks_two_sample(std::move(a), std::move(b));
            return py::make_tuple(t.statistic, t.p_value);
        },
        py::arg("a"), py::arg("b"), "(statistic, asymptotic p-value).");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kilbas-Saigo functions, stretched fractional operators and Pearson diffusions";
    m.attr("__version__") = KSDIFF_VERSION;
    export_errors(m);
    export_special(m);
    export_fracops(m);
    export_pearson(m);
    export_stochastic(m);
}
