#pragma once

#include "mfm/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mfm {

enum class QuadratureRule { Trapezoid, GaussHermite };

/// Truncated-domain rule for expectations over x ~ N(0, t_i).
/// Trapezoid integrates [-kappa sqrt(t_i), kappa sqrt(t_i)] on `points` nodes;
/// Gauss-Hermite uses `points` nodes on the whole line and ignores kappa.
/// With `adaptive_kappa` the domain becomes kappa + (n - i) psi sqrt(t_i),
/// wide enough to cover the large-x peak of the integrand.
struct GridSpec {
    double kappa = 5;
    std::size_t points = 2048;
    QuadratureRule rule = QuadratureRule::Trapezoid;
    bool adaptive_kappa = false;

    void validate() const;
};

/// Half-width multiplier actually used for slice i.
double effective_kappa(const ModelSolution& solution, std::size_t i, const GridSpec& grid);

/// E[h(x)] for x ~ N(mean, variance) on the rule of `grid` (kappa relative to the
/// standard deviation). Double precision; zero variance returns h(mean).
double gaussian_expectation(const std::function<double(double)>& h, double mean, double variance,
                            const GridSpec& grid);

/// Same, for integrands known through their logarithm; returns log E[exp(log_h(x))].
double gaussian_log_expectation(const std::function<double(double)>& log_h, double mean,
                                double variance, const GridSpec& grid);

/// log of the integrand of N_i:
///   (2 pi t_i)^{-1/2} exp(-x^2 / (2 t_i)) P^_{i,i+1}(x) exp(psi x - psi^2 t_i / 2).
/// Evaluated in double from the extended-precision coefficients.
class NIntegrand {
public:
    NIntegrand(const ModelSolution& solution, std::size_t i);

    /// log P^_{i,i+1}(x)
    double log_bond(double x) const;
    /// log of the full integrand including the Gaussian density.
    double log_value(double x) const;
    double value(double x) const;

    double t() const { return t_; }
    double psi() const { return psi_; }

private:
    std::vector<double> log_c_;
    double psi_;
    double t_;
};

double n_by_grid(const ModelSolution& solution, std::size_t i, const GridSpec& grid);

struct MonteCarloEstimate {
    double mean = 0;
    double standard_error = 0;
    std::size_t paths = 0;
};

/// Sample mean of P^_{i,i+1}(x) exp(psi x - psi^2 t_i / 2), x ~ N(0, t_i).
/// Normal draws come from a counter-based generator keyed by (seed, path), and
/// partial sums are combined in a fixed pairwise tree, so the result is
/// bitwise reproducible for a given seed regardless of thread count.
MonteCarloEstimate n_by_mc(const ModelSolution& solution, std::size_t i, std::size_t paths,
                           std::uint64_t seed);

/// Standard normal draw number `index` of stream `seed`.
double counter_normal(std::uint64_t seed, std::uint64_t index);

struct IntegrandProfile {
    std::vector<double> x;
    std::vector<double> value;
    std::vector<double> log_value;
    /// Interior grid points where the discrete derivative changes sign from + to -.
    std::vector<double> maxima;
};

IntegrandProfile integrand_profile(const ModelSolution& solution, std::size_t i,
                                   std::span<const double> x_grid);

struct MartingaleResidual {
    std::size_t slice = 0;
    /// |E[P^_{i,i+1} (1 + L~_i tau_i f_i(x))] - P^_0i| / P^_0i
    double unconditional = 0;
    /// |E[P^_{i,i} | x_{i-1} = 0] - P^_{i-1,i}(0)| / P^_{i-1,i}(0); zero for i = 0.
    double conditional = 0;
};

std::vector<MartingaleResidual> martingale_residuals(const ModelSolution& solution,
                                                     const GridSpec& grid);

}  // namespace mfm
