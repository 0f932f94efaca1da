#pragma once

#include "mfm/model.hpp"
#include "mfm/real.hpp"
#include "oracles.hpp"

#include <string>

namespace testing {

inline oracle::Big big(const mfm::Real& x) { return oracle::Big(mfm::to_decimal(x)); }

inline double dbl(const mfm::Real& x) { return static_cast<double>(x); }

/// Flat test curve with psi given as a decimal string (exact at any precision).
inline mfm::TenorModel flat(double r0, std::size_t n, double tau, const std::string& psi = "0",
                            unsigned bits = mfm::kDefaultPrecisionBits) {
    mfm::PrecisionScope scope(bits);
    return mfm::flat_curve(mfm::parse_real(std::to_string(r0)), n,
                           mfm::parse_real(std::to_string(tau)), bits)
        .with_psi(mfm::parse_real(psi));
}

}  // namespace testing
