#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ksdiff/pearson_spectral.hpp"

namespace ksdiff {

struct MCConfig {
    int n_paths = 100000;
    /// Subordinator grid step for the Z integral.
    double dt = 1e-3;
    std::uint64_t seed = 20240601;
    int n_beta_factors = 200;
    /// Fold the lognormal law of the omitted beta factors into each product draw.
    bool beta_tail_correction = true;
    int n_workers = 1;
    /// Euler-Maruyama step for the Jacobi model.
    double em_dt = 1e-4;
    long long max_steps = 100000000;

    void validate() const;
};

enum class ZMethod { SubordinatorIntegral, BetaProduct };
std::string to_string(ZMethod m);

struct TimeChangeSample {
    double z = 0.0;
    ZMethod method = ZMethod::SubordinatorIntegral;
    long long steps = 0;  // grid steps or beta factors used
};

struct EstimateWithError {
    double mean = 0.0;
    double stderr_ = 0.0;
    long long n = 0;
};

/// Independent random streams for the purposes a path needs.
enum class Stream : std::uint32_t { Subordinator = 0, Beta = 1, Diffusion = 2 };

/// Generator for (seed, path, stream); identical keys give identical sequences.
using Engine = std::mt19937_64;
Engine make_engine(std::uint64_t seed, std::uint64_t path, Stream stream);

/// Positive alpha-stable variable S with E exp(-l S) = exp(-l^alpha) (Kanter's representation).
double sample_stable(double alpha, Engine& rng);
/// Increment over a step dt: dt^(1/alpha) S.
double sample_stable_increment(double alpha, double dt, Engine& rng);

/// Z = int_0^inf (1 - sigma_s)_+^gamma ds by the left-endpoint sum on the grid s_k = k dt.
TimeChangeSample sample_Z(double alpha, double gamma, const MCConfig& cfg, Engine& rng);

/// Deterministic data of the beta-product law for fixed (alpha, gamma).
struct BetaProductPlan {
    double alpha = 0.5, gamma = 0.0;
    int n_factors = 0;
    double log_prefactor = 0.0;         // log Gamma(gamma+1)/Gamma(alpha+gamma+1) + sum log factors
    std::vector<double> p;              // first Beta parameters, n < n_factors
    double q = 0.0;                     // common second Beta parameter (1-alpha)/(alpha+gamma)
    double tail_log_mean = 0.0;         // mean of the log of the omitted product
    double tail_log_var = 0.0;          // variance of the log of the omitted product
    bool tail_correction = true;
};
BetaProductPlan beta_product_plan(double alpha, double gamma, int n_factors, bool tail_correction = true);
TimeChangeSample sample_Z_beta_product(const BetaProductPlan& plan, Engine& rng);
TimeChangeSample sample_Z_beta_product(double alpha, double gamma, const MCConfig& cfg, Engine& rng);

/// Z for every path index 0..n_paths-1 (path i uses its own streams); independent of n_workers.
std::vector<double> sample_Z_paths(double alpha, double gamma, const MCConfig& cfg,
                                   ZMethod method = ZMethod::SubordinatorIntegral);

/// Mean and standard error of exp(-lambda t^(alpha+gamma) Z) over the paths.
EstimateWithError mc_laplace_transform(double alpha, double gamma, double lambda, double t, const MCConfig& cfg);
EstimateWithError laplace_from_samples(const std::vector<double>& z, double lambda, double scale);

/// Exact transition draw X_tau | X_0 = x0 (OU Gaussian, CIR noncentral chi-square,
/// Jacobi Euler-Maruyama with reflection).
double sample_pearson_transition(const PearsonModel& model, double x0, double tau, const MCConfig& cfg, Engine& rng);

/// X at time t^(alpha+gamma) Z with Z and the diffusion driven by separate streams.
double sample_time_changed_pearson(const PearsonModel& model, const StretchedOrder& ord, double t, double x0,
                                   const MCConfig& cfg, std::uint64_t path);
std::vector<double> sample_time_changed_pearson_paths(const PearsonModel& model, const StretchedOrder& ord, double t,
                                                      double x0, const MCConfig& cfg);

/// MC estimate of E[g^H_{1,0}(t^(alpha+gamma) Z, y)], with g^H_{1,0} the classical hyperbolic solution.
EstimateWithError hyperbolic_subordination_estimate(const PearsonModel& model, const StretchedOrder& ord, double A,
                                                    double B, const SpectralCoeffs& coeffs, double t, double y,
                                                    const MCConfig& cfg);

/// Mean and standard error of the values, summed in index order.
EstimateWithError summarize(const std::vector<double>& values);

struct KSTest {
    double statistic = 0.0;
    double p_value = 1.0;
};
/// Asymptotic Kolmogorov survival function Q(x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_q(double x);
KSTest ks_two_sample(std::vector<double> a, std::vector<double> b);
/// One-sample test against a continuous CDF.
KSTest ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf);

}  // namespace ksdiff
