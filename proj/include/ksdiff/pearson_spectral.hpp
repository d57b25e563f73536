#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ksdiff/fracops.hpp"

namespace ksdiff {

enum class ModelKind { OU, CIR, Jacobi };
std::string to_string(ModelKind k);

/// Pearson diffusion dX = mu(X) dt + sqrt(2 D(X)) dW with a purely discrete spectrum.
///   OU:     D = theta sigma2,             mu = -theta (x - mu0)
///   CIR:    D = theta x / a,              mu = -theta (x - b/a)
///   Jacobi: D = theta (1 - x^2)/(a+b+2),  mu = theta (b - a - (a+b+2) x)/(a+b+2)
/// The Jacobi generator is scaled so that lambda_n = theta n (n+a+b+1)/(a+b+2).
struct PearsonModel {
    ModelKind kind = ModelKind::OU;
    double theta = 1.0;
    double p1 = 0.0;  // OU: mu,     CIR: a, Jacobi: a
    double p2 = 1.0;  // OU: sigma2, CIR: b, Jacobi: b

    static PearsonModel ou(double theta, double mu, double sigma2) { return {ModelKind::OU, theta, mu, sigma2}; }
    static PearsonModel cir(double theta, double a, double b) { return {ModelKind::CIR, theta, a, b}; }
    static PearsonModel jacobi(double theta, double a, double b) { return {ModelKind::Jacobi, theta, a, b}; }

    void validate() const;
    double lower() const;  // state-space endpoints (may be infinite)
    double upper() const;
    bool in_state_space(double x) const;
    double drift(double x) const;
    double diffusion(double x) const;  // D(x)
    double diffusion_prime(double x) const;
    std::string describe() const;
};

double stationary_density(const PearsonModel& model, double x);
double eigenvalue(const PearsonModel& model, int n);

/// Normalized Q_n(x) with E_m[Q_n Q_k] = delta_nk, by three-term recurrence.
double orthonormal_poly(const PearsonModel& model, int n, double x);
/// Q_0(x) .. Q_{count-1}(x).
std::vector<double> orthonormal_polys(const PearsonModel& model, int count, double x);
inline constexpr int kMaxPolyDegree = 1000;

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;  // sum to 1: quadrature for E_m[f]
};
/// Golub-Welsch rule with n nodes for the stationary density; cached and shared.
const GaussRule& gauss_rule(const PearsonModel& model, int n);

enum class CoeffKind { Backward, Forward };

struct SpectralCoeffs {
    std::vector<double> values;
    CoeffKind kind = CoeffKind::Backward;
    double parseval = 0.0;              // sum a_n^2
    double reconstruction_error = 0.0;  // max |sum a_n Q_n - h| (times m for Forward) on the check grid
    std::vector<double> check_grid;
    int N() const { return int(values.size()); }
};

/// a_n = int h Q_n m dx (Backward) or int h Q_n dx (Forward) by a 2N-node Gauss rule.
SpectralCoeffs project_initial(const PearsonModel& model, const std::function<double(double)>& h, int N,
                               CoeffKind kind);
/// Sampled variant: h is the piecewise-linear interpolant of (xs, hs); zero outside [xs.front(), xs.back()].
SpectralCoeffs project_initial(const PearsonModel& model, const std::vector<double>& xs,
                               const std::vector<double>& hs, int N, CoeffKind kind);
/// Points where the reconstruction error is reported.
std::vector<double> check_grid(const PearsonModel& model, int n = 41);

struct SeriesCfg {
    int N = 100;
    int N_max = 200;
    double tol = 1e-8;
    bool auto_increase = true;
    double t_min = 1e-3;
    double ks_tol = 1e-12;
};

struct SeriesValue {
    double value = 0.0;
    int terms = 0;
    double tail_bound = 0.0;
    bool truncation_warning = false;
    bool small_t_warning = false;
};

struct SeriesGrid {
    std::vector<double> values;
    int terms = 0;
    double tail_bound = 0.0;  // max over the grid
    bool truncation_warning = false;
    bool small_t_warning = false;
};

/// Temporal factor of mode n with eigenvalue lambda_n, and its tail envelope
/// |T_n| <= envelope(n) used for the truncation estimate.
struct TemporalModes {
    std::function<double(int)> factor;
    std::function<double(int)> envelope;
};

TemporalModes classical_modes(const PearsonModel& model, double t);
TemporalModes stretched_modes(const PearsonModel& model, const StretchedOrder& ord, double t, double ks_tol = 1e-12);
TemporalModes hyperbolic_modes(const PearsonModel& model, const StretchedOrder& ord, double A, double B, double t,
                               double ks_tol = 1e-12);

/// m(x) sum_n T_n Q_n(x) Q_n(y) on a grid of x values.
SeriesGrid transition_density_grid(const PearsonModel& model, const TemporalModes& modes, const std::vector<double>& xs,
                                   double y, const SeriesCfg& cfg = {});

SeriesValue transition_density_classical(const PearsonModel& model, double x, double t, double y,
                                         const SeriesCfg& cfg = {});
SeriesValue transition_density_stretched(const PearsonModel& model, const StretchedOrder& ord, double x, double t,
                                         double y, const SeriesCfg& cfg = {});
SeriesValue transition_density_hyperbolic(const PearsonModel& model, const StretchedOrder& ord, double A, double B,
                                          double x, double t, double y, const SeriesCfg& cfg = {});

/// Closed-form OU kernel: normal with mean mu+(y-mu)e^{-theta t}, variance sigma2 (1-e^{-2 theta t}).
double ou_transition_density_exact(const PearsonModel& model, double x, double t, double y);

/// sum a_n T_n(t) Q_n(y) (Backward) or m(x) sum a_n T_n(t) Q_n(x) (Forward).
double solve_with_modes(const PearsonModel& model, const TemporalModes& modes, const SpectralCoeffs& coeffs,
                        CoeffKind expected, double point);
double solve_backward_stretched(const PearsonModel& model, const StretchedOrder& ord, const SpectralCoeffs& coeffs,
                                double t, double y, double ks_tol = 1e-12);
double solve_forward_stretched(const PearsonModel& model, const StretchedOrder& ord, const SpectralCoeffs& coeffs,
                               double t, double x, double ks_tol = 1e-12);
double solve_backward_hyperbolic(const PearsonModel& model, const StretchedOrder& ord, double A, double B,
                                 const SpectralCoeffs& coeffs, double t, double y, double ks_tol = 1e-12);
double solve_forward_hyperbolic(const PearsonModel& model, const StretchedOrder& ord, double A, double B,
                                const SpectralCoeffs& coeffs, double t, double x, double ks_tol = 1e-12);

/// T_n(t) of A (D)^2 T + B D T + lambda_n T = 0 with T(0) = 1, D T(0) = 1.
/// n = 0 returns 1 (lambda_0 = 0, zero initial velocity).
double hyperbolic_temporal_factor(const PearsonModel& model, const StretchedOrder& ord, double A, double B, int n,
                                  double t, double ks_tol = 1e-12);
/// D T_n(t) = K1 a* E(a* t^beta) + K2 b* E(b* t^beta); -lambda/B E(...) when A = 0.
double hyperbolic_temporal_derivative(const PearsonModel& model, const StretchedOrder& ord, double A, double B, int n,
                                      double t, double ks_tol = 1e-12);
/// Large-lambda form (1/lambda)[(A+B) L1 t^-beta - A L2 t^-2beta] with
/// L1 = 1/Gamma(1-alpha), L2 = -Gamma(1-beta)/(Gamma(1-alpha-beta) Gamma(1-alpha)).
double hyperbolic_temporal_asymptotic(const StretchedOrder& ord, double A, double B, double lambda, double t);

enum class Equation { Backward, Forward };

/// Space-time samples values[i][j] = g(ts[i], xs[j]) on uniform grids, ts[0] = 0.
struct SolutionGrid {
    std::vector<double> ts;
    std::vector<double> xs;
    std::vector<std::vector<double>> values;
};

struct ResidualOptions {
    Equation equation = Equation::Backward;
    /// D g(0, x_j) for A > 0; empty means zero.
    std::vector<double> initial_velocity;
    /// Residual reported on t >= t_from only.
    double t_from = 0.0;
    double tol = 0.0;  // grid-too-coarse warning threshold for the time operator
};

struct ResidualNorms {
    double sup = 0.0;
    double l2 = 0.0;  // root-mean-square over the reported nodes
    int points = 0;
    bool coarse_warning = false;
};

/// Residual of A (D)^2 g + B D g - G g (Backward) or the Fokker-Planck form (Forward).
ResidualNorms residual_check(const SolutionGrid& grid, const PearsonModel& model, const StretchedOrder& ord, double A,
                             double B, const ResidualOptions& opt = {});

}  // namespace ksdiff
