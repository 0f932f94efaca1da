#pragma once

#include "mfm/model.hpp"
#include "mfm/real.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mfm {

/// Triangular matrix of expansion coefficients c_j^(i): row i (i = 0..n-1)
/// holds n - i entries and expands the one-step rebased bond
///   P^_{i,i+1}(x) = sum_j c_j^(i) exp(j psi x - (j psi)^2 t_i / 2).
class CoefficientMatrix {
public:
    CoefficientMatrix() = default;
    explicit CoefficientMatrix(std::size_t steps) : rows_(steps) {}

    std::size_t steps() const { return rows_.size(); }
    std::span<const Real> row(std::size_t i) const { return rows_.at(i); }
    const Real& at(std::size_t i, std::size_t j) const { return rows_.at(i).at(j); }

    std::vector<Real>& mutable_row(std::size_t i) { return rows_.at(i); }

private:
    std::vector<std::vector<Real>> rows_;
};

struct ModelSolution {
    TenorModel model;
    RebasedCurve curve;
    std::vector<Real> accruals;
    CoefficientMatrix coeffs;
    /// Convexity-adjusted Libors L~_i, i = 0..n-1.
    std::vector<Real> adjusted_libors;
    /// N_i = E[P^_{i,i+1} f_i] = sum_j c_j^(i) exp(j psi^2 t_i).
    std::vector<Real> expectations;

    std::size_t steps() const { return coeffs.steps(); }
};

/// Backward recursion from c^(n-1) = [1], L~_{n-1} tau_{n-1} = P^_{0,n-1} - 1.
/// Throws NegativeForward when the rebased curve is not strictly decreasing.
ModelSolution solve(const TenorModel& model);

/// Independent volatilities solved concurrently; output order follows `psis`.
std::vector<ModelSolution> solve_sweep(const TenorModel& model, std::span<const Real> psis);

/// c_1^(i) = sum_{j=i+1}^{n-1} L~_j tau_j. Domain error for i = n-1.
Real closed_form_c1(const ModelSolution& solution, std::size_t i);

/// P^_{i,i+1}(x) from row i.
Real one_step_rebased_bond(const ModelSolution& solution, std::size_t i, const Real& x);

/// P^_{ij}(x_i) = P_ij / P_in as a function of the driver at t_i, 0 <= i <= j <= n.
Real rebased_bond(const ModelSolution& solution, std::size_t i, std::size_t j, const Real& x);

/// P_ij(x_i).
Real bond(const ModelSolution& solution, std::size_t i, std::size_t j, const Real& x);

/// L_i(x) = L~_i exp(psi x - psi^2 t_i / 2).
Real libor(const ModelSolution& solution, std::size_t i, const Real& x);

/// Largest relative violation of the sum rule sum_j c_j^(i) = P^_{0,i+1}.
Real max_sum_rule_error(const ModelSolution& solution);

/// Largest relative violation of L~_i tau_i N_i = P^_0i - P^_{0,i+1}.
Real max_libor_identity_error(const ModelSolution& solution);

}  // namespace mfm
