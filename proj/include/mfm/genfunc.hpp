#pragma once

#include "mfm/model.hpp"
#include "mfm/real.hpp"
#include "mfm/solver.hpp"

#include <cstddef>
#include <vector>

namespace mfm {

/// f^(i)(x) = sum_j c_j^(i) x^j, the generating function of slice i.
/// N_i = f^(i)(exp(psi^2 t_i)) and f^(i)(1) = P^_{0,i+1}.
struct GenFunction {
    std::size_t slice = 0;
    std::vector<Real> coeffs;
    /// psi^2 t_i, so that eval(gf, exp(psi_t)) = N_i.
    Real psi_t;

    std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

GenFunction from_solution(const ModelSolution& solution, std::size_t i);

/// Generating functions for every slice (index = slice) from the recursion
///   f^(i)(x) = f^(i+1)(x) + (P^_{0,i+1} - P^_{0,i+2}) x f^(i+1)(x q) / f^(i+1)(q),
/// q = exp(psi^2 t_{i+1}), which never touches the convexity-adjusted Libors.
std::vector<GenFunction> build_libor_free(const TenorModel& model);

Real eval(const GenFunction& gf, const Real& x);
Complex eval(const GenFunction& gf, const Complex& z);

/// Horner evaluation of an ascending coefficient sequence.
Real eval_polynomial(std::span<const Real> coeffs, const Real& x);
Complex eval_polynomial(std::span<const Real> coeffs, const Complex& z);

/// psi = 0 limit: prod_{j=i+1}^{n-1} (1 + L_j^fwd tau_j x).
GenFunction zero_vol_limit(const TenorModel& model, std::size_t i);

/// psi -> infinity limit: 1 + (P^_{0,n-1} - 1) x + ... + (P^_{0,i+1} - P^_{0,i+2}) x^{n-i-1}.
GenFunction infinite_vol_limit(const TenorModel& model, std::size_t i);

/// L_i^fwd (1 - sum_{j>i} L_j^fwd tau_j / (1 + L_j^fwd tau_j) (exp(psi^2 t_i) - 1)).
/// Accurate to O((psi^2 t_i)^2); the caller is responsible for psi^2 t_i << 1.
Real low_vol_libor(const TenorModel& model, std::size_t i);

/// L^fwd (1 + L^fwd tau) / (L^fwd tau) exp(-(n-i-1) psi^2 t_i), flat curves only.
Real high_vol_libor(const TenorModel& model, std::size_t i);

/// E[P^_{i,i+1} exp(phi x - phi^2 t_i / 2)] = f^(i)(exp(psi phi t_i)).
Real phi_expectation(const ModelSolution& solution, std::size_t i, const Real& phi);

}  // namespace mfm
