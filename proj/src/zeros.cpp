#include "mfm/zeros.hpp"

#include "mfm/errors.hpp"
#include "mfm/flat_rate.hpp"
#include "mfm/parallel.hpp"
#include "mfm/polynomial_roots.hpp"
#include "mfm/solver.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mfm {

Real RootSet::min_modulus() const {
    require(!roots.empty(), ErrorKind::InsufficientData, "empty root set");
    Real best = abs(roots.front());
    for (const auto& z : roots) best = std::min(best, abs(z));
    return best;
}

RootSet find_roots(std::span<const Real> coeffs, std::size_t slice, Real psi) {
    RootSet rs{slice, std::move(psi), polynomial_roots(coeffs), {}};
    const unsigned bits = working_precision_bits();
    const Real tol = precision_tolerance(bits, 8);
    const Real lead = abs(coeffs.back());
    const auto degree = static_cast<long>(coeffs.size() - 1);
    rs.residuals.reserve(rs.roots.size());
    for (const auto& z : rs.roots) {
        const Real r = abs(eval_polynomial(coeffs, z));
        const Real scale = lead * pow(std::max(abs(z), Real(1)), degree);
        if (r > tol * scale) {
            std::ostringstream msg;
            msg << "root residual " << to_decimal(r, 6) << " exceeds " << to_decimal(tol * scale, 6)
                << " (slice " << slice << ", degree " << degree << ")";
            throw Error(ErrorKind::NumericFailure, msg.str());
        }
        rs.residuals.push_back(r);
    }
    return rs;
}

RootSet find_roots(const GenFunction& gf, Real psi) {
    return find_roots(std::span<const Real>(gf.coeffs), gf.slice, std::move(psi));
}

RootSet slice_roots(const TenorModel& model, std::size_t i) {
    require(i + 1 < model.steps(), ErrorKind::Domain,
            "slice has a constant generating function (needs i < n-1)");
    PrecisionScope scope(model.precision_bits());
    const auto sol = solve(model);
    return find_roots(sol.coeffs.row(i), i, model.psi());
}

Real crossing_indicator(const TenorModel& model, std::size_t i, const Real& psi) {
    PrecisionScope scope(model.precision_bits());
    const auto rs = slice_roots(model.with_psi(psi), i);
    return rs.min_modulus() - exp(psi * psi * model.dates()[i]);
}

CriticalReport critical_volatility(const TenorModel& model, std::size_t i, double psi_lo,
                                   double psi_hi, std::size_t scan_points) {
    require(psi_lo >= 0 && psi_hi > psi_lo, ErrorKind::InvalidInput,
            "critical volatility bracket must satisfy 0 <= lo < hi");
    require(scan_points >= 2, ErrorKind::InvalidInput, "need at least two scan points");
    require(i + 1 < model.steps(), ErrorKind::Domain,
            "slice has a constant generating function (needs i < n-1)");
    PrecisionScope scope(model.precision_bits());

    std::vector<double> grid(scan_points);
    for (std::size_t k = 0; k < scan_points; ++k) {
        grid[k] = psi_lo + (psi_hi - psi_lo) * static_cast<double>(k) /
                               static_cast<double>(scan_points - 1);
    }
    grid.back() = psi_hi;
    std::vector<double> values(scan_points);
    parallel_for(scan_points, [&](std::size_t k) {
        values[k] = static_cast<double>(crossing_indicator(model, i, Real(grid[k])));
    });

    CriticalReport report;
    report.slice = i;
    report.tolerance = kCriticalTolerance;
    for (std::size_t k = 1; k < scan_points; ++k) {
        if (values[k] >= values[k - 1]) report.indicator_monotone = false;
    }

    std::vector<std::pair<double, double>> brackets;
    for (std::size_t k = 1; k < scan_points; ++k) {
        if ((values[k - 1] > 0) != (values[k] > 0)) brackets.emplace_back(grid[k - 1], grid[k]);
    }
    if (brackets.empty()) {
        std::ostringstream msg;
        msg << "no sign change of the crossing indicator on [" << psi_lo << ", " << psi_hi
            << "] (D(lo) = " << values.front() << ", D(hi) = " << values.back() << ")";
        throw Error(ErrorKind::NotBracketed, msg.str());
    }

    std::vector<std::pair<double, double>> refined(brackets.size());
    parallel_for(brackets.size(), [&](std::size_t b) {
        auto [lo, hi] = brackets[b];
        const bool lo_positive = crossing_indicator(model, i, Real(lo)) > 0;
        while (hi - lo > kCriticalTolerance) {
            const double mid = 0.5 * (lo + hi);
            if ((crossing_indicator(model, i, Real(mid)) > 0) == lo_positive) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        refined[b] = {lo, hi};
    });

    report.bracket_lo = refined.front().first;
    report.bracket_hi = refined.front().second;
    report.psi_cr = 0.5 * (report.bracket_lo + report.bracket_hi);
    for (const auto& [lo, hi] : refined) report.crossings.push_back(0.5 * (lo + hi));

    const double t_i = static_cast<double>(model.dates()[i]);
    report.z_star = std::exp(report.psi_cr * report.psi_cr * t_i);
    report.min_root_modulus =
        static_cast<double>(slice_roots(model.with_psi(Real(report.psi_cr)), i).min_modulus());

    FlatParameters flat;
    if (i > 0 && is_flat(model, &flat)) {
        report.formula_psi_cr = critical_vol_formula(static_cast<double>(flat.r0),
                                                     static_cast<double>(flat.tau),
                                                     model.steps(), i)
                                    .exact;
    }
    return report;
}

std::vector<RootSet> root_locus(const TenorModel& model, std::size_t i,
                                std::span<const double> psi_grid) {
    require(!psi_grid.empty(), ErrorKind::InvalidInput, "empty volatility grid");
    require(std::is_sorted(psi_grid.begin(), psi_grid.end()), ErrorKind::InvalidInput,
            "volatility grid must be ascending");
    PrecisionScope scope(model.precision_bits());
    std::vector<std::optional<RootSet>> slots(psi_grid.size());
    parallel_for(psi_grid.size(), [&](std::size_t k) {
        slots[k] = slice_roots(model.with_psi(Real(psi_grid[k])), i);
    });
    std::vector<RootSet> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));

    // Greedy matching on all pairwise distances, shortest first.
    for (std::size_t s = 1; s < out.size(); ++s) {
        const auto& prev = out[s - 1].roots;
        auto& cur = out[s];
        const std::size_t d = prev.size();
        struct Pair {
            double distance;
            std::size_t from;
            std::size_t to;
        };
        std::vector<Pair> pairs;
        pairs.reserve(d * d);
        for (std::size_t a = 0; a < d; ++a) {
            for (std::size_t b = 0; b < d; ++b) {
                pairs.push_back({static_cast<double>(abs(prev[a] - cur.roots[b])), a, b});
            }
        }
        std::stable_sort(pairs.begin(), pairs.end(),
                         [](const Pair& x, const Pair& y) { return x.distance < y.distance; });
        std::vector<bool> used_from(d, false);
        std::vector<bool> used_to(d, false);
        std::vector<std::size_t> assignment(d);
        std::size_t matched = 0;
        for (const auto& p : pairs) {
            if (used_from[p.from] || used_to[p.to]) continue;
            used_from[p.from] = used_to[p.to] = true;
            assignment[p.from] = p.to;
            if (++matched == d) break;
        }
        std::vector<Complex> roots(d);
        std::vector<Real> residuals(d);
        for (std::size_t a = 0; a < d; ++a) {
            roots[a] = cur.roots[assignment[a]];
            residuals[a] = cur.residuals[assignment[a]];
        }
        cur.roots = std::move(roots);
        cur.residuals = std::move(residuals);
    }
    return out;
}

DensityJump density_and_jump(const RootSet& rs) {
    require(rs.degree() >= 8, ErrorKind::InsufficientData,
            "density estimate needs at least 8 zeros");
    std::vector<const Complex*> upper;
    for (const auto& z : rs.roots) {
        if (z.im > 0) upper.push_back(&z);
    }
    require(upper.size() >= 2, ErrorKind::InsufficientData,
            "density estimate needs two conjugate pairs");
    std::sort(upper.begin(), upper.end(),
              [](const Complex* a, const Complex* b) { return arg(*a) < arg(*b); });
    const Real theta1 = arg(*upper[0]);
    const Real theta2 = arg(*upper[1]);
    // Mean of the gaps 2 theta1 (across the axis) and theta2 - theta1.
    const Real gap = (theta1 + theta2) / 2;
    DensityJump out;
    out.rho0 = abs(*upper[0]);
    out.g0 = 1 / gap;
    out.jump = 2 * pi() * out.g0 / out.rho0;
    return out;
}

Real log_f_via_zeros(const RootSet& rs, const Real& z) {
    const Real eps = precision_tolerance(working_precision_bits(), 2);
    Real sum(0);
    for (const auto& zk : rs.roots) {
        const Real num = abs(zk - Complex(z));
        const Real den = abs(zk);
        require(num > eps * den, ErrorKind::Divergence, "log|f| diverges at a zero");
        sum += log(num / den);
    }
    return sum;
}

Real log_monic_via_zeros(const RootSet& rs, const Real& z) {
    const Real eps = precision_tolerance(working_precision_bits(), 2);
    Real sum(0);
    for (const auto& zk : rs.roots) {
        const Real d = abs(zk - Complex(z));
        require(d > eps * std::max(abs(zk), Real(1)), ErrorKind::Divergence,
                "log|f| diverges at a zero");
        sum += log(d);
    }
    return sum;
}

double log_f_density_integral(const std::function<double(double)>& rho,
                              const std::function<double(double)>& density, double z,
                              std::size_t panels) {
    require(panels >= 1, ErrorKind::InvalidInput, "need at least one panel");
    const double width = std::numbers::pi / static_cast<double>(panels);
    auto integrand = [&](double theta) {
        const double u = z / rho(theta);
        return density(theta) * std::log(u * u - 2 * std::cos(theta) * u + 1);
    };
    double total = 0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = width * static_cast<double>(p);
        total += boost::math::quadrature::gauss<double, 20>::integrate(integrand, a, a + width);
    }
    return total;
}

}  // namespace mfm
