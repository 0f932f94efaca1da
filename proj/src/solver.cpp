#include "mfm/solver.hpp"

#include "mfm/errors.hpp"
#include "mfm/parallel.hpp"

#include <optional>
#include <string>

namespace mfm {

namespace {

void require_slice(const ModelSolution& s, std::size_t i) {
    require(i < s.steps(), ErrorKind::Domain, "slice index out of range");
}

}  // namespace

ModelSolution solve(const TenorModel& model) {
    PrecisionScope scope(model.precision_bits());
    const std::size_t n = model.steps();
    const auto& t = model.dates();

    ModelSolution s{model, rebase(model), model.accruals(), CoefficientMatrix(n), {}, {}};
    const auto& curve = s.curve.values;
    for (std::size_t i = 0; i < n; ++i) {
        require(curve[i] > curve[i + 1], ErrorKind::NegativeForward,
                "rebased curve not strictly decreasing at t_" + std::to_string(i));
    }

    const Real psi2 = model.psi() * model.psi();
    s.adjusted_libors.assign(n, Real(0));
    s.expectations.assign(n, Real(0));

    s.coeffs.mutable_row(n - 1) = {Real(1)};
    s.expectations[n - 1] = 1;
    s.adjusted_libors[n - 1] = (curve[n - 1] - 1) / s.accruals[n - 1];

    for (std::size_t i = n - 1; i-- > 0;) {
        const auto& next = s.coeffs.row(i + 1);
        auto& row = s.coeffs.mutable_row(i);
        row.assign(n - i, Real(0));

        // c_j^(i) = c_j^(i+1) + L~_{i+1} tau_{i+1} c_{j-1}^(i+1) exp((j-1) psi^2 t_{i+1})
        const Real weight = s.adjusted_libors[i + 1] * s.accruals[i + 1];
        const Real growth = exp(psi2 * t[i + 1]);
        Real power(1);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j < next.size()) row[j] = next[j];
            if (j >= 1) {
                row[j] += weight * next[j - 1] * power;
                power *= growth;
            }
        }

        const Real z = exp(psi2 * t[i]);
        Real sum(0);
        Real zj(1);
        for (const auto& c : row) {
            sum += c * zj;
            zj *= z;
        }
        s.expectations[i] = sum;
        s.adjusted_libors[i] = (curve[i] - curve[i + 1]) / (sum * s.accruals[i]);
    }
    return s;
}

std::vector<ModelSolution> solve_sweep(const TenorModel& model, std::span<const Real> psis) {
    PrecisionScope scope(model.precision_bits());
    std::vector<TenorModel> models;
    models.reserve(psis.size());
    for (const auto& psi : psis) models.push_back(model.with_psi(psi));
    std::vector<std::optional<ModelSolution>> slots(psis.size());
    parallel_for(psis.size(), [&](std::size_t k) { slots[k] = solve(models[k]); });
    std::vector<ModelSolution> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

Real closed_form_c1(const ModelSolution& solution, std::size_t i) {
    require(i + 1 < solution.steps(), ErrorKind::Domain, "c_1 does not exist on the last slice");
    PrecisionScope scope(solution.model.precision_bits());
    Real sum(0);
    for (std::size_t j = i + 1; j < solution.steps(); ++j) {
        sum += solution.adjusted_libors[j] * solution.accruals[j];
    }
    return sum;
}

Real one_step_rebased_bond(const ModelSolution& solution, std::size_t i, const Real& x) {
    require_slice(solution, i);
    PrecisionScope scope(solution.model.precision_bits());
    const Real& psi = solution.model.psi();
    const Real& ti = solution.model.dates()[i];
    const auto row = solution.coeffs.row(i);
    Real sum(0);
    for (std::size_t k = 0; k < row.size(); ++k) {
        const Real kpsi = psi * static_cast<unsigned long>(k);
        sum += row[k] * exp(kpsi * x - kpsi * kpsi * ti / 2);
    }
    return sum;
}

Real rebased_bond(const ModelSolution& solution, std::size_t i, std::size_t j, const Real& x) {
    const std::size_t n = solution.steps();
    require(i <= j && j <= n, ErrorKind::Domain, "rebased bond needs 0 <= i <= j <= n");
    if (j == n) return Real(1);
    PrecisionScope scope(solution.model.precision_bits());
    const Real& psi = solution.model.psi();
    const Real psi2 = psi * psi;
    const Real& ti = solution.model.dates()[i];
    const Real& tj = solution.model.dates()[j];
    const auto row = solution.coeffs.row(j);

    Real plain(0);
    Real shifted(0);
    for (std::size_t k = 0; k < row.size(); ++k) {
        const Real kk = static_cast<unsigned long>(k);
        plain += row[k] * exp(kk * psi * x - kk * kk * psi2 * ti / 2);
        shifted += row[k] * exp((kk + 1) * psi * x - (kk * kk + 1) * psi2 * ti / 2 +
                                kk * psi2 * (tj - ti));
    }
    return plain + solution.adjusted_libors[j] * solution.accruals[j] * shifted;
}

Real bond(const ModelSolution& solution, std::size_t i, std::size_t j, const Real& x) {
    const std::size_t n = solution.steps();
    require(i <= j && j <= n, ErrorKind::Domain, "bond needs 0 <= i <= j <= n");
    if (i == n) return Real(1);
    PrecisionScope scope(solution.model.precision_bits());
    const Real numeraire_inverse =
        one_step_rebased_bond(solution, i, x) *
        (1 + solution.accruals[i] * libor(solution, i, x));
    return rebased_bond(solution, i, j, x) / numeraire_inverse;
}

Real libor(const ModelSolution& solution, std::size_t i, const Real& x) {
    require_slice(solution, i);
    PrecisionScope scope(solution.model.precision_bits());
    const Real& psi = solution.model.psi();
    return solution.adjusted_libors[i] * exp(psi * x - psi * psi * solution.model.dates()[i] / 2);
}

Real max_sum_rule_error(const ModelSolution& solution) {
    PrecisionScope scope(solution.model.precision_bits());
    Real worst(0);
    for (std::size_t i = 0; i < solution.steps(); ++i) {
        Real sum(0);
        for (const auto& c : solution.coeffs.row(i)) sum += c;
        worst = std::max(worst, relative_difference(sum, solution.curve.values[i + 1]));
    }
    return worst;
}

Real max_libor_identity_error(const ModelSolution& solution) {
    PrecisionScope scope(solution.model.precision_bits());
    Real worst(0);
    const auto& p = solution.curve.values;
    for (std::size_t i = 0; i < solution.steps(); ++i) {
        const Real lhs =
            solution.adjusted_libors[i] * solution.accruals[i] * solution.expectations[i];
        worst = std::max(worst, relative_difference(lhs, p[i] - p[i + 1]));
    }
    return worst;
}

}  // namespace mfm
