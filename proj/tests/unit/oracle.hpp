#pragma once

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "json.hpp"

namespace oracle {

/// Reference fixture written by tests/oracles/generate.py.
inline nlohmann::json load(const std::string& name) {
    std::ifstream in(std::string(KSDIFF_ORACLE_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing oracle fixture " + name);
    return nlohmann::json::parse(in);
}

/// exp(x^2) erfc(x) for x >= 0; continued fraction where erfc underflows.
inline double erfcx(double x) {
    if (x < 5.0) return std::exp(x * x) * std::erfc(x);
    double f = x;
    for (int k = 60; k >= 1; --k) f = x + (0.5 * k) / f;
    return 1.0 / (std::sqrt(3.14159265358979323846) * f);
}

/// Composite 20-point Gauss-Legendre nodes and weights on [lo, hi].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(double lo, double hi, int panels) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    std::vector<double> x, w;
    const double h = (hi - lo) / panels;
    for (int k = 0; k < panels; ++k) {
        const double mid = lo + (k + 0.5) * h;
        const auto& a = Rule::abscissa();
        const auto& wt = Rule::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (int s : {-1, 1}) {
                if (a[i] == 0.0 && s == 1) continue;
                x.push_back(mid + s * 0.5 * h * a[i]);
                w.push_back(0.5 * h * wt[i]);
            }
        }
    }
    return {x, w};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
