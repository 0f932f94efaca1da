#include "mfm/flat_rate.hpp"

#include "mfm/errors.hpp"
#include "mfm/parallel.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

namespace mfm {

namespace {

double toms748_root(const std::function<double(double)>& f, double lo, double hi) {
    std::uintmax_t iterations = 200;
    const auto r = boost::math::tools::toms748_solve(
        f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
    return 0.5 * (r.first + r.second);
}

void require_spec(const FlatPolySpec& spec) {
    require(spec.a > 1, ErrorKind::Domain, "flat polynomial needs a > 1");
    require(spec.degree >= 1, ErrorKind::Domain, "flat polynomial needs degree >= 1");
}

// n log(a/n) - (n+1) log((a-1)/(n+1)); negative while h(rho*) < 0.
double n_star_gap(double a, double n) {
    return n * std::log(a / n) - (n + 1) * std::log((a - 1) / (n + 1));
}

}  // namespace

FlatPolySpec FlatPolySpec::from_rate(double r0, double tau, std::size_t degree) {
    require(r0 > 0 && tau > 0, ErrorKind::Domain, "flat-rate analytics need r0 > 0 and tau > 0");
    FlatPolySpec spec{-1 / std::expm1(-r0 * tau), degree};
    require_spec(spec);
    return spec;
}

std::vector<Real> p_coefficients(const FlatPolySpec& spec) {
    require_spec(spec);
    std::vector<Real> c(spec.degree + 1, Real(1));
    c[0] = Real(spec.a);
    return c;
}

std::vector<Real> flat_infinite_vol_coefficients(double r0, double tau, std::size_t degree) {
    require(r0 > 0 && tau > 0, ErrorKind::Domain, "flat-rate analytics need r0 > 0 and tau > 0");
    const Real x = Real(r0) * Real(tau);
    const Real weight = -expm1(-x);
    std::vector<Real> c{Real(1)};
    for (std::size_t j = 1; j <= degree; ++j) {
        c.push_back(weight * exp(x * static_cast<unsigned long>(j)));
    }
    return c;
}

RootSet p_roots(const FlatPolySpec& spec) {
    const auto c = p_coefficients(spec);
    return find_roots(std::span<const Real>(c));
}

std::optional<double> rho_curve(const FlatPolySpec& spec, double theta) {
    require_spec(spec);
    require(theta >= 0 && theta <= std::numbers::pi, ErrorKind::Domain,
            "theta must lie in [0, pi]");
    const double a = spec.a;
    const double n = static_cast<double>(spec.degree);
    const double c = std::cos(theta);
    // Compared on logs: rho^{2(n+1)} overflows double for large n.
    auto F = [&](double rho) {
        const double rhs = (a - 1) * (a - 1) * rho * rho - 2 * a * (a - 1) * rho * c + a * a;
        return 2 * (n + 1) * std::log(rho) - std::log(rhs);
    };
    const double lo = 1 + 1e-6;
    const double hi = std::pow(a, 2 / n);
    if (!(F(hi) > 0)) return std::nullopt;
    // Scan down from the top for the first sign change: the largest root.
    constexpr int kScan = 2000;
    double upper = hi;
    for (int k = 1; k <= kScan; ++k) {
        const double x = hi - (hi - lo) * k / kScan;
        if (F(x) <= 0) {
            if (F(x) == 0) return x;
            return toms748_root(F, x, upper);
        }
        upper = x;
    }
    return std::nullopt;
}

RealAxisReport real_axis_cases(const FlatPolySpec& spec) {
    require_spec(spec);
    const double a = spec.a;
    const double n = static_cast<double>(spec.degree);
    auto h = [&](double rho) { return std::pow(rho, n + 1) - (a - 1) * rho + a; };

    RealAxisReport out;
    out.rho_star = std::pow((a - 1) / (n + 1), 1 / n);
    out.h_at_rho_star = h(out.rho_star);
    const double scale = a;
    if (std::abs(out.h_at_rho_star) <= 1e-12 * scale) {
        out.kind = RealAxisCase::Tangent;
        out.solutions = {out.rho_star};
        return out;
    }
    if (out.h_at_rho_star > 0) {
        out.kind = RealAxisCase::NoSolution;
        return out;
    }
    out.kind = RealAxisCase::TwoSolutions;
    // h(0) = a > 0 and h grows without bound beyond rho*.
    double hi = 2 * out.rho_star;
    while (h(hi) <= 0) hi *= 2;
    out.solutions = {toms748_root(h, 0, out.rho_star), toms748_root(h, out.rho_star, hi)};
    const double rs = out.rho_star;
    const double delta = std::sqrt(2 * (n * std::pow(rs, n + 1) - a) /
                                   (n * (n + 1) * std::pow(rs, n - 1)));
    out.quadratic_approximation = {rs - delta, rs + delta};
    return out;
}

NStar n_star(double a) {
    require(a > 1, ErrorKind::Domain, "n_star needs a > 1");
    NStar out;
    std::size_t n = 1;
    while (n_star_gap(a, static_cast<double>(n)) < 0) {
        ++n;
        require(n < 1000000, ErrorKind::NumericFailure, "n_star scan did not terminate");
    }
    out.boundary = n;
    const double lo = n > 1 ? static_cast<double>(n - 1) : 1e-9;
    auto g = [&](double x) { return n_star_gap(a, x); };
    out.value = g(lo) < 0 ? toms748_root(g, lo, static_cast<double>(n)) : static_cast<double>(n);
    return out;
}

AngularCounts angular_check(const FlatPolySpec& spec) { return angular_check(spec, p_roots(spec)); }

AngularCounts angular_check(const FlatPolySpec& spec, const RootSet& roots) {
    require_spec(spec);
    require(spec.degree % 2 == 0, ErrorKind::Domain, "angular check needs even degree");
    const std::size_t half = spec.degree / 2;
    const double width = std::numbers::pi / static_cast<double>(spec.degree + 1);
    AngularCounts out;
    out.upper.assign(half, 0);
    out.lower.assign(half, 0);
    for (const auto& z : roots.roots) {
        const double theta = static_cast<double>(arg(z));
        const double t = std::abs(theta);
        for (std::size_t k = 1; k <= half; ++k) {
            if (t > width * static_cast<double>(2 * k - 1) && t < width * static_cast<double>(2 * k)) {
                (theta > 0 ? out.upper : out.lower)[k - 1] += 1;
                break;
            }
        }
    }
    out.one_per_interval =
        std::all_of(out.upper.begin(), out.upper.end(), [](std::size_t c) { return c == 1; }) &&
        std::all_of(out.lower.begin(), out.lower.end(), [](std::size_t c) { return c == 1; });
    return out;
}

std::vector<Complex> zeros_approx(const FlatPolySpec& spec) {
    require_spec(spec);
    const Real n(static_cast<unsigned long>(spec.degree));
    const Real radius = pow(Real(spec.a), 1 / n);
    std::vector<Complex> z;
    z.reserve(spec.degree);
    for (std::size_t k = 1; k <= spec.degree; ++k) {
        z.push_back(polar(radius, pi() * static_cast<unsigned long>(2 * k - 1) / n));
    }
    return z;
}

CriticalVolFormula critical_vol_formula(double r0, double tau, std::size_t n, std::size_t i) {
    require(i > 0 && i + 1 < n, ErrorKind::Domain, "critical volatility formula needs 0 < i < n-1");
    require(r0 > 0 && tau > 0, ErrorKind::Domain, "flat-rate analytics need r0 > 0 and tau > 0");
    const double t_i = static_cast<double>(i) * tau;
    const double nf = static_cast<double>(n - i - 1);
    const double a = -1 / std::expm1(-r0 * tau);
    CriticalVolFormula out;
    const double psi2 = (std::log(a) / nf - r0 * tau) / t_i;
    if (psi2 >= 0) out.exact = std::sqrt(psi2);
    out.simplified = std::sqrt(std::log(1 / (r0 * tau)) / (static_cast<double>(i) * nf * tau));
    return out;
}

double max_volatility(double r0, double t_n, double tau) {
    require(r0 > 0 && tau > 0 && t_n > 0, ErrorKind::Domain, "r0, t_n and tau must be positive");
    const double ratio = t_n / tau;
    const double n = std::round(ratio);
    require(std::abs(ratio - n) <= 1e-9 * std::max(1.0, ratio), ErrorKind::Domain,
            "t_n / tau must be an integer");
    const double half = std::floor(n / 2);
    require(half >= 1, ErrorKind::Domain, "need at least two periods");
    return std::sqrt(std::log(1 / (r0 * tau)) / (half * half * tau));
}

double round_half_even(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // nearbyint honours the default round-to-nearest-even mode.
    return std::nearbyint(value * scale) / scale;
}

std::vector<Table1Row> table1(std::span<const double> r0_list, std::span<const double> tenor_list,
                              std::span<const double> tau_list) {
    std::vector<Table1Row> rows;
    for (const double r0 : r0_list) {
        for (const double t_n : tenor_list) {
            for (const double tau : tau_list) rows.push_back({r0, t_n, tau, 0, 0});
        }
    }
    parallel_for(rows.size(), [&](std::size_t k) {
        auto& row = rows[k];
        row.psi_max = max_volatility(row.r0, row.t_n, row.tau);
        row.psi_max_percent = round_half_even(100 * row.psi_max, 2);
    });
    return rows;
}

std::vector<Table1Row> table1_default() {
    const double r0[] = {0.01, 0.02, 0.03, 0.04, 0.05};
    const double tenors[] = {5, 10, 20, 30};
    const double taus[] = {0.25, 0.5};
    return table1(r0, tenors, taus);
}

std::string table1_csv(std::span<const Table1Row> rows) {
    std::ostringstream out;
    out << "r0,t_n,tau,psi_max_percent\n";
    for (const auto& row : rows) {
        out << row.r0 << ',' << row.t_n << ',' << row.tau << ',' << std::fixed
            << std::setprecision(2) << row.psi_max_percent << std::defaultfloat
            << std::setprecision(6) << '\n';
    }
    return out.str();
}

std::string table1_markdown(std::span<const Table1Row> rows) {
    std::vector<std::pair<double, double>> columns;
    std::vector<double> r0s;
    std::map<std::pair<double, std::pair<double, double>>, double> cells;
    for (const auto& row : rows) {
        const std::pair<double, double> col{row.t_n, row.tau};
        if (std::find(columns.begin(), columns.end(), col) == columns.end()) columns.push_back(col);
        if (std::find(r0s.begin(), r0s.end(), row.r0) == r0s.end()) r0s.push_back(row.r0);
        cells[{row.r0, col}] = row.psi_max_percent;
    }
    std::ostringstream out;
    out << "| r0 |";
    for (const auto& [t_n, tau] : columns) out << " t_n=" << t_n << ", tau=" << tau << " |";
    out << "\n|---|";
    for (std::size_t k = 0; k < columns.size(); ++k) out << "---|";
    out << '\n';
    for (const double r0 : r0s) {
        out << "| " << round_half_even(100 * r0, 4) << "% |";
        for (const auto& col : columns) {
            const auto it = cells.find({r0, col});
            if (it == cells.end()) {
                out << "  |";
            } else {
                out << ' ' << std::fixed << std::setprecision(2) << it->second << "% |"
                    << std::defaultfloat << std::setprecision(6);
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace mfm
