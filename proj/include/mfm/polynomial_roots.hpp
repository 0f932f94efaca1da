#pragma once

#include "mfm/real.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mfm {

struct AberthDiagnostics {
    std::size_t iterations = 0;
    std::size_t unconverged = 0;
    double max_relative_correction = 0;
};

/// All complex roots of the real polynomial sum_j coeffs[j] z^j by
/// Aberth-Ehrlich simultaneous iteration at the working precision.
/// Starting points come from the Newton polygon of log|c_j| (one circle per
/// hull edge). Roots of real polynomials are returned in exact conjugate
/// pairs, sorted by argument then modulus.
///
/// Throws Error(NumericFailure) with diagnostics when the iteration cap is
/// reached before every root has converged.
std::vector<Complex> polynomial_roots(std::span<const Real> coeffs,
                                      AberthDiagnostics* diagnostics = nullptr);

/// Snaps nearly-real roots onto the axis and symmetrizes conjugate pairs.
void enforce_conjugate_pairs(std::vector<Complex>& roots, const Real& tolerance);

}  // namespace mfm
