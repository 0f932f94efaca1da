#pragma once

#include "mfm/real.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace mfm {

/// Tenor dates t_0 = 0 < t_1 < ... < t_n, the initial discount curve P(0, t_i)
/// on those dates, the Libor volatility psi and the working precision.
class TenorModel {
public:
    TenorModel(std::vector<Real> dates, std::vector<Real> discounts, Real psi,
               unsigned precision_bits = kDefaultPrecisionBits);

    /// Number of accrual periods n (dates has n + 1 entries).
    std::size_t steps() const { return dates_.size() - 1; }

    const std::vector<Real>& dates() const { return dates_; }
    const std::vector<Real>& discounts() const { return discounts_; }
    const Real& psi() const { return psi_; }
    unsigned precision_bits() const { return precision_bits_; }

    /// tau_i = t_{i+1} - t_i, i = 0..n-1.
    std::vector<Real> accruals() const;
    Real accrual(std::size_t i) const { return dates_[i + 1] - dates_[i]; }

    /// r_i = -log(P_0i) / t_i for i >= 1; entry 0 is NaN (no rate at t = 0).
    std::vector<Real> zero_rates() const;

    TenorModel with_psi(Real psi) const;

private:
    std::vector<Real> dates_;
    std::vector<Real> discounts_;
    Real psi_;
    unsigned precision_bits_;
};

/// Discounts rebased to the terminal bond: P^_0i = P_0i / P_0n.
struct RebasedCurve {
    std::vector<Real> values;
};

/// P_0i = exp(-r0 t_i) on t_i = i tau, psi = 0.
TenorModel flat_curve(const Real& r0, std::size_t n, const Real& tau,
                      unsigned precision_bits = kDefaultPrecisionBits);
TenorModel flat_curve(double r0, std::size_t n, double tau,
                      unsigned precision_bits = kDefaultPrecisionBits);

RebasedCurve rebase(const TenorModel& model);

/// Simple forward rates (P^_0j / P^_0,j+1 - 1) / tau_j, j = 0..n-1.
std::vector<Real> forward_libors(const RebasedCurve& curve, std::span<const Real> accruals);
std::vector<Real> forward_libors(const TenorModel& model);

/// t -> lambda t, r -> r / lambda (discounts unchanged), psi -> psi / sqrt(lambda).
TenorModel scale(const TenorModel& model, const Real& lambda);

/// Constant-rate description of a curve whose accruals and forwards are all
/// equal (to relative tolerance 10^(-bits/8)).
struct FlatParameters {
    Real r0;
    Real tau;
};
bool is_flat(const TenorModel& model, FlatParameters* out = nullptr);

/// Curve CSV: header `t,P`, one row per tenor date starting at t = 0, P = 1.
TenorModel read_curve_csv(std::istream& in, Real psi = Real(0),
                          unsigned precision_bits = kDefaultPrecisionBits);
TenorModel read_curve_csv(const std::filesystem::path& path, Real psi = Real(0),
                          unsigned precision_bits = kDefaultPrecisionBits);
void write_curve_csv(std::ostream& out, const TenorModel& model);

}  // namespace mfm
