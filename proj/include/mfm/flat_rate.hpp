#pragma once

#include "mfm/real.hpp"
#include "mfm/zeros.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mfm {

/// p_n(z) = a + z + z^2 + ... + z^n with a = 1 / (1 - exp(-r0 tau)) > 1.
/// Its zeros, scaled by exp(-r0 tau), are the zeros of the flat-rate
/// infinite-volatility generating function of degree n.
struct FlatPolySpec {
    double a = 0;
    std::size_t degree = 0;

    static FlatPolySpec from_rate(double r0, double tau, std::size_t degree);
};

/// Ascending coefficients [a, 1, ..., 1] at working precision.
std::vector<Real> p_coefficients(const FlatPolySpec& spec);

/// Flat-rate f_inf of degree n_f: 1 + (1 - e^{-r0 tau}) sum_{j=1}^{n_f} (e^{r0 tau} x)^j.
std::vector<Real> flat_infinite_vol_coefficients(double r0, double tau, std::size_t degree);

RootSet p_roots(const FlatPolySpec& spec);

/// Largest solution rho > 1 of rho^{2(n+1)} = (a-1)^2 rho^2 - 2a(a-1) rho cos(theta) + a^2,
/// the polar curve carrying the zeros. Searched on [1 + 1e-6, a^{2/n}];
/// empty when no solution exists there (only possible at theta = 0).
std::optional<double> rho_curve(const FlatPolySpec& spec, double theta);

enum class RealAxisCase { TwoSolutions, Tangent, NoSolution };

struct RealAxisReport {
    RealAxisCase kind = RealAxisCase::NoSolution;
    /// Minimum of h(rho) = rho^{n+1} - (a-1) rho + a.
    double rho_star = 0;
    double h_at_rho_star = 0;
    /// Roots of h (ascending), empty in the no-solution case.
    std::vector<double> solutions;
    /// rho_star -/+ sqrt(2 (n rho*^{n+1} - a) / (n (n+1) rho*^{n-1})).
    std::vector<double> quadratic_approximation;
};

RealAxisReport real_axis_cases(const FlatPolySpec& spec);

struct NStar {
    /// Real solution of (a/n)^n = ((a-1)/(n+1))^{n+1}.
    double value = 0;
    /// [n*] = ceil(value): h has two real solutions for n < [n*], none for n >= [n*].
    std::size_t boundary = 0;
};

NStar n_star(double a);

struct AngularCounts {
    /// Roots with theta in ((2k-1) pi/(n+1), 2k pi/(n+1)), k = 1..n/2.
    std::vector<std::size_t> upper;
    /// Roots in the mirrored intervals below the real axis.
    std::vector<std::size_t> lower;
    bool one_per_interval = false;
};

/// Requires even degree.
AngularCounts angular_check(const FlatPolySpec& spec);
AngularCounts angular_check(const FlatPolySpec& spec, const RootSet& roots);

/// Zeros of a + z^n: a^{1/n} exp(i pi (2k-1)/n), k = 1..n.
std::vector<Complex> zeros_approx(const FlatPolySpec& spec);

struct CriticalVolFormula {
    /// psi from exp(r0 tau + psi^2 t_i) = a^{1/(n-i-1)}; empty if psi^2 < 0.
    std::optional<double> exact;
    /// psi from psi^2 = log(1/(r0 tau)) / (i (n-i-1) tau).
    double simplified = 0;
};

/// Domain error unless 0 < i < n-1.
CriticalVolFormula critical_vol_formula(double r0, double tau, std::size_t n, std::size_t i);

struct Table1Row {
    double r0 = 0;
    double t_n = 0;
    double tau = 0;
    double psi_max = 0;
    /// 100 psi_max rounded half-to-even to 2 decimals.
    double psi_max_percent = 0;
};

/// psi_max = sqrt(log(1/(r0 tau)) / ([n/2]^2 tau)), n = t_n / tau.
/// Domain error when t_n / tau is not an integer.
double max_volatility(double r0, double t_n, double tau);

/// Rows ordered by r0, then t_n, then tau.
std::vector<Table1Row> table1(std::span<const double> r0_list, std::span<const double> tenor_list,
                              std::span<const double> tau_list);
std::vector<Table1Row> table1_default();

double round_half_even(double value, int decimals);

std::string table1_csv(std::span<const Table1Row> rows);
/// Layout of the published table: one line per r0, (t_n, tau) column pairs.
std::string table1_markdown(std::span<const Table1Row> rows);

}  // namespace mfm
