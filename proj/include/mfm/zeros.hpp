#pragma once

#include "mfm/genfunc.hpp"
#include "mfm/model.hpp"
#include "mfm/real.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mfm {

/// Complex zeros of one generating function.
struct RootSet {
    std::size_t slice = 0;
    Real psi;
    std::vector<Complex> roots;
    /// |f(z_k)| for each root.
    std::vector<Real> residuals;

    std::size_t degree() const { return roots.size(); }
    Real min_modulus() const;
};

/// Roots of an ascending coefficient sequence. Residuals are checked against
/// 10^(-bits/8) |c_deg| max(1, |z_k|)^deg; failure throws NumericFailure.
RootSet find_roots(std::span<const Real> coeffs, std::size_t slice = 0, Real psi = Real(0));
RootSet find_roots(const GenFunction& gf, Real psi = Real(0));

/// Roots of f^(i) for the model at its own psi.
RootSet slice_roots(const TenorModel& model, std::size_t i);

/// D(psi) = min_k |z_k(psi)| - exp(psi^2 t_i); positive while every zero is
/// outside the circle through N_i's evaluation point.
Real crossing_indicator(const TenorModel& model, std::size_t i, const Real& psi);

struct CriticalReport {
    std::size_t slice = 0;
    double psi_cr = 0;
    /// exp(psi_cr^2 t_i)
    double z_star = 0;
    /// Constant-rate estimate (exact form), present for flat curves only.
    std::optional<double> formula_psi_cr;
    double bracket_lo = 0;
    double bracket_hi = 0;
    double tolerance = 0;
    /// Smallest root modulus at psi_cr.
    double min_root_modulus = 0;
    /// Every sign change found on the detection grid (first one is psi_cr).
    std::vector<double> crossings;
    /// False when D(psi) was not monotone on the detection grid.
    bool indicator_monotone = true;
};

inline constexpr double kCriticalTolerance = 1e-4;

/// Locates psi_cr where the zeros of f^(i) enter the circle of radius
/// exp(psi^2 t_i), by scanning the bracket and bisecting each sign change of
/// the crossing indicator to width <= 1e-4. Throws NotBracketed when the
/// indicator keeps its sign over the whole bracket.
CriticalReport critical_volatility(const TenorModel& model, std::size_t i, double psi_lo,
                                   double psi_hi, std::size_t scan_points = 16);

/// One RootSet per grid point (ascending grid). Roots of consecutive sets are
/// reordered by greedy nearest-neighbour matching so index k follows one
/// trajectory through the grid.
std::vector<RootSet> root_locus(const TenorModel& model, std::size_t i,
                                std::span<const double> psi_grid);

struct DensityJump {
    /// Modulus of the conjugate pair nearest the positive real axis.
    Real rho0;
    /// Angular root density at theta = 0.
    Real g0;
    /// 2 pi g(0) / rho(0).
    Real jump;
};

/// Finite-size estimates of the zero density at the positive real axis.
/// g(0) is the reciprocal of the mean angular gap between the two conjugate
/// pairs nearest theta = 0 (exact for equally spaced zeros). Needs degree >= 8.
DensityJump density_and_jump(const RootSet& rs);

/// sum_k log|1 - z / z_k| = log|f(z)| - log c_0. Divergence error at a root.
Real log_f_via_zeros(const RootSet& rs, const Real& z);

/// sum_k log|z - z_k| = log|f(z) / c_deg|.
Real log_monic_via_zeros(const RootSet& rs, const Real& z);

/// Continuum form int_0^pi g(theta) log(z^2/rho^2 - 2 cos(theta) z/rho + 1) dtheta,
/// evaluated by composite Gauss-Legendre quadrature (double precision).
double log_f_density_integral(const std::function<double(double)>& rho,
                              const std::function<double(double)>& density, double z,
                              std::size_t panels = 256);

}  // namespace mfm
