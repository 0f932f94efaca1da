#pragma once

#include "mfm/flat_rate.hpp"
#include "mfm/quadrature.hpp"
#include "mfm/solver.hpp"
#include "mfm/zeros.hpp"

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

namespace mfm {

/// Doubles in CSV output use 17 significant digits (round-trip exact).
std::string format_double(double value, int significant = 17);

/// {psi, precision_bits, slices: [{i, t, L_fwd, L_tilde, N, coeffs, below_double_subnormal}]}.
/// Extended-precision values are decimal strings.
nlohmann::json solution_json(const ModelSolution& solution);

/// Header `i,t,L_fwd,L_tilde,N`.
std::string libor_csv(const ModelSolution& solution, int significant = 17);

/// Header `j,c_j`; coefficients as full-precision decimal strings.
std::string genfunc_csv(const GenFunction& gf);

/// Header `psi,k,re,im,modulus`.
std::string locus_csv(std::span<const RootSet> locus, int significant = 17);

/// {i, psi_cr, z_star, formula_psi_cr, bracket, tolerance, ...}.
nlohmann::json critical_json(const CriticalReport& report);

/// Header `x,integrand`.
std::string profile_csv(const IntegrandProfile& profile, int significant = 17);

/// Keyed by slice: {"0": {unconditional, conditional}, ...}.
nlohmann::json residual_json(std::span<const MartingaleResidual> residuals);

struct LogNPoint {
    double psi = 0;
    double log_n = 0;
    /// log f_inf(exp(psi^2 t_i)), the large-volatility approximation.
    double log_n_inf = 0;
    /// Central finite difference of log N in psi (one-sided at the ends).
    double derivative = 0;
};

/// Header `psi,logN,logNinf,dlogN_dpsi`.
std::string logn_csv(std::span<const LogNPoint> points, int significant = 17);

}  // namespace mfm
