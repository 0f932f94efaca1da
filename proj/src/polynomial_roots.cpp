#include "mfm/polynomial_roots.hpp"

#include "mfm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mfm {

namespace {

struct HullPoint {
    double x;
    double y;
};

// Upper convex hull of (j, log|c_j|); each edge spans roots of one modulus scale.
std::vector<HullPoint> upper_hull(std::span<const Real> coeffs) {
    std::vector<HullPoint> pts;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] == 0) continue;
        pts.push_back({static_cast<double>(j), static_cast<double>(log(abs(coeffs[j])))});
    }
    std::vector<HullPoint> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
            if (cross < 0) break;
            hull.pop_back();
        }
        hull.push_back(p);
    }
    return hull;
}

std::vector<Complex> starting_points(std::span<const Real> coeffs) {
    const auto hull = upper_hull(coeffs);
    const std::size_t degree = coeffs.size() - 1;
    std::vector<Complex> z;
    z.reserve(degree);
    const Real two_pi = 2 * pi();
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        const auto count = static_cast<std::size_t>(hull[e + 1].x - hull[e].x);
        const Real radius = exp(Real((hull[e].y - hull[e + 1].y) / (hull[e + 1].x - hull[e].x)));
        // Offset keeps the initial set off the real axis and away from symmetry.
        const Real offset = Real(0.4) + Real(static_cast<unsigned long>(e)) * Real(0.7);
        for (std::size_t k = 0; k < count; ++k) {
            const Real angle = two_pi * static_cast<unsigned long>(k) / count + offset / count;
            z.push_back(polar(radius, angle));
        }
    }
    // Zero roots (c_0 = 0 ...) are not expected for model polynomials; cover them anyway.
    while (z.size() < degree) z.push_back(polar(Real(1), Real(0.3)));
    return z;
}

void horner_with_derivative(std::span<const Real> coeffs, const Complex& z, Complex& p,
                            Complex& dp) {
    p = Complex();
    dp = Complex();
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        dp = dp * z + p;
        p = p * z;
        p.re += *it;
    }
}

}  // namespace

std::vector<Complex> polynomial_roots(std::span<const Real> coeffs,
                                      AberthDiagnostics* diagnostics) {
    require(coeffs.size() >= 2, ErrorKind::Domain, "polynomial degree must be at least 1");
    require(coeffs.back() != 0, ErrorKind::Domain, "leading coefficient is zero");
    const std::size_t degree = coeffs.size() - 1;
    AberthDiagnostics diag;

    if (degree == 1) {
        if (diagnostics != nullptr) *diagnostics = diag;
        return {Complex(-coeffs[0] / coeffs[1])};
    }

    const unsigned bits = working_precision_bits();
    const Real eps = ldexp(Real(1), -static_cast<int>(bits) + 6);
    const std::size_t max_iterations = 200 + 20 * degree;

    auto z = starting_points(coeffs);
    std::vector<bool> done(degree, false);
    // Below this a correction that stops shrinking is rounding noise.
    const Real floor_level = ldexp(Real(1), -static_cast<int>(bits) / 2);
    // Clustered or repeated roots stall far above eps; accept those once the
    // backward error is at rounding level and the step is reasonably small.
    const Real cluster_level = std::min(ldexp(Real(1), -static_cast<int>(bits) / 16), Real(1e-6));
    std::vector<Real> previous(degree, Real(1));
    std::size_t remaining = degree;

    Complex p;
    Complex dp;
    for (; diag.iterations < max_iterations && remaining > 0; ++diag.iterations) {
        double worst = 0;
        for (std::size_t k = 0; k < degree; ++k) {
            if (done[k]) continue;
            horner_with_derivative(coeffs, z[k], p, dp);
            if (p.re == 0 && p.im == 0) {
                done[k] = true;
                --remaining;
                continue;
            }
            Complex repulsion;
            for (std::size_t j = 0; j < degree; ++j) {
                if (j != k) repulsion += Complex(Real(1)) / (z[k] - z[j]);
            }
            Complex step;
            if (dp.re == 0 && dp.im == 0) {
                step = polar(abs(z[k]) * Real(1e-3) + eps, Real(1.1) * static_cast<unsigned long>(k + 1));
            } else {
                const Complex w = p / dp;
                step = w / (Complex(Real(1)) - w * repulsion);
            }
            z[k] -= step;
            const Real scale = std::max(abs(z[k]), Real(1) * eps);
            const Real rel = abs(step) / scale;
            worst = std::max(worst, static_cast<double>(rel));
            // Backward-error test: |p(z)| at the rounding level of sum |c_j| |z|^j.
            Real bound(0);
            const Real modulus = abs(z[k]);
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) bound = bound * modulus + abs(*it);
            const bool at_noise = abs(p) <= eps * bound * static_cast<unsigned long>(degree);
            if (rel <= eps || (at_noise && rel < cluster_level) ||
                (rel < floor_level && rel * 2 >= previous[k])) {
                done[k] = true;
                --remaining;
            }
            previous[k] = rel;
        }
        diag.max_relative_correction = worst;
    }
    diag.unconverged = remaining;
    if (diagnostics != nullptr) *diagnostics = diag;
    if (remaining > 0) {
        std::ostringstream msg;
        msg << "Aberth iteration did not converge: degree " << degree << ", " << remaining
            << " roots unconverged after " << diag.iterations
            << " iterations, last max relative correction " << diag.max_relative_correction;
        throw Error(ErrorKind::NumericFailure, msg.str());
    }

    enforce_conjugate_pairs(z, ldexp(Real(1), -static_cast<int>(bits) / 2));
    std::sort(z.begin(), z.end(), [](const Complex& a, const Complex& b) {
        const Real aa = arg(a);
        const Real ab = arg(b);
        if (aa != ab) return aa < ab;
        return norm(a) < norm(b);
    });
    return z;
}

void enforce_conjugate_pairs(std::vector<Complex>& roots, const Real& tolerance) {
    std::vector<std::size_t> upper;
    std::vector<std::size_t> lower;
    for (std::size_t k = 0; k < roots.size(); ++k) {
        auto& r = roots[k];
        if (abs(r.im) <= tolerance * std::max(abs(r), Real(1))) {
            r.im = 0;
        } else if (r.im > 0) {
            upper.push_back(k);
        } else {
            lower.push_back(k);
        }
    }
    require(upper.size() == lower.size(), ErrorKind::NumericFailure,
            "roots of a real polynomial are not closed under conjugation");
    std::vector<bool> taken(lower.size(), false);
    for (const auto u : upper) {
        std::size_t best = lower.size();
        Real best_distance;
        for (std::size_t m = 0; m < lower.size(); ++m) {
            if (taken[m]) continue;
            const Real d = abs(roots[u] - conj(roots[lower[m]]));
            if (best == lower.size() || d < best_distance) {
                best = m;
                best_distance = d;
            }
        }
        taken[best] = true;
        Complex mean = (roots[u] + conj(roots[lower[best]]));
        mean.re /= 2;
        mean.im /= 2;
        roots[u] = mean;
        roots[lower[best]] = conj(mean);
    }
}

}  // namespace mfm
