#include "mfm/genfunc.hpp"

#include "mfm/errors.hpp"

namespace mfm {

namespace {

void require_slice(const TenorModel& model, std::size_t i) {
    require(i < model.steps(), ErrorKind::Domain, "slice index out of range");
}

}  // namespace

Real eval_polynomial(std::span<const Real> coeffs, const Real& x) {
    Real acc(0);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Complex eval_polynomial(std::span<const Real> coeffs, const Complex& z) {
    Complex acc;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc *= z;
        acc.re += *it;
    }
    return acc;
}

GenFunction from_solution(const ModelSolution& solution, std::size_t i) {
    require_slice(solution.model, i);
    PrecisionScope scope(solution.model.precision_bits());
    const auto row = solution.coeffs.row(i);
    const Real& psi = solution.model.psi();
    return {i, std::vector<Real>(row.begin(), row.end()), psi * psi * solution.model.dates()[i]};
}

std::vector<GenFunction> build_libor_free(const TenorModel& model) {
    PrecisionScope scope(model.precision_bits());
    const std::size_t n = model.steps();
    const auto& t = model.dates();
    const auto curve = rebase(model).values;
    for (std::size_t i = 0; i < n; ++i) {
        require(curve[i] > curve[i + 1], ErrorKind::NegativeForward,
                "rebased curve not strictly decreasing");
    }
    const Real psi2 = model.psi() * model.psi();

    std::vector<GenFunction> out(n);
    out[n - 1] = {n - 1, {Real(1)}, psi2 * t[n - 1]};
    for (std::size_t i = n - 1; i-- > 0;) {
        const auto& next = out[i + 1].coeffs;
        const Real q = exp(psi2 * t[i + 1]);
        const Real weight = (curve[i + 1] - curve[i + 2]) / eval_polynomial(next, q);

        std::vector<Real> coeffs(next.size() + 1, Real(0));
        Real qj(1);
        for (std::size_t j = 0; j < next.size(); ++j) {
            coeffs[j] += next[j];
            coeffs[j + 1] += weight * next[j] * qj;
            qj *= q;
        }
        out[i] = {i, std::move(coeffs), psi2 * t[i]};
    }
    return out;
}

Real eval(const GenFunction& gf, const Real& x) { return eval_polynomial(gf.coeffs, x); }

Complex eval(const GenFunction& gf, const Complex& z) { return eval_polynomial(gf.coeffs, z); }

GenFunction zero_vol_limit(const TenorModel& model, std::size_t i) {
    require_slice(model, i);
    PrecisionScope scope(model.precision_bits());
    const auto fwd = forward_libors(model);
    const auto tau = model.accruals();
    std::vector<Real> coeffs{Real(1)};
    for (std::size_t j = i + 1; j < model.steps(); ++j) {
        const Real a = fwd[j] * tau[j];
        coeffs.emplace_back(0);
        for (std::size_t k = coeffs.size() - 1; k > 0; --k) coeffs[k] += a * coeffs[k - 1];
    }
    return {i, std::move(coeffs), Real(0)};
}

GenFunction infinite_vol_limit(const TenorModel& model, std::size_t i) {
    require_slice(model, i);
    PrecisionScope scope(model.precision_bits());
    const auto curve = rebase(model).values;
    const std::size_t n = model.steps();
    std::vector<Real> coeffs{Real(1)};
    for (std::size_t j = 1; j + i < n; ++j) coeffs.push_back(curve[n - j] - curve[n - j + 1]);
    const Real& psi = model.psi();
    return {i, std::move(coeffs), psi * psi * model.dates()[i]};
}

Real low_vol_libor(const TenorModel& model, std::size_t i) {
    require_slice(model, i);
    PrecisionScope scope(model.precision_bits());
    const auto fwd = forward_libors(model);
    const auto tau = model.accruals();
    Real sum(0);
    for (std::size_t j = i + 1; j < model.steps(); ++j) {
        const Real a = fwd[j] * tau[j];
        sum += a / (1 + a);
    }
    const Real& psi = model.psi();
    return fwd[i] * (1 - sum * expm1(psi * psi * model.dates()[i]));
}

Real high_vol_libor(const TenorModel& model, std::size_t i) {
    require_slice(model, i);
    FlatParameters flat;
    require(is_flat(model, &flat), ErrorKind::UnsupportedInput,
            "high-volatility asymptotics need a flat forward curve");
    PrecisionScope scope(model.precision_bits());
    const Real fwd = forward_libors(model)[0];
    const Real a = fwd * flat.tau;
    const Real& psi = model.psi();
    const Real exponent =
        Real(static_cast<unsigned long>(model.steps() - i - 1)) * psi * psi * model.dates()[i];
    return fwd * (1 + a) / a * exp(-exponent);
}

Real phi_expectation(const ModelSolution& solution, std::size_t i, const Real& phi) {
    require_slice(solution.model, i);
    PrecisionScope scope(solution.model.precision_bits());
    const auto row = solution.coeffs.row(i);
    return eval_polynomial(row, exp(solution.model.psi() * phi * solution.model.dates()[i]));
}

}  // namespace mfm
