#include "mfm/errors.hpp"
#include "mfm/flat_rate.hpp"
#include "mfm/genfunc.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace mfm;
using testing::dbl;

namespace {

const FlatPolySpec kA80{80.0, 9};

double h(const FlatPolySpec& s, double rho) {
    return std::pow(rho, static_cast<double>(s.degree + 1)) - (s.a - 1) * rho + s.a;
}

}  // namespace

TEST_CASE("constant-rate polynomial coefficients") {
    const auto spec = FlatPolySpec::from_rate(0.05, 0.25, 12);
    CHECK(spec.a == doctest::Approx(-1 / std::expm1(-0.0125)).epsilon(1e-14));
    CHECK(spec.a == doctest::Approx(80.5).epsilon(1e-3));
    PrecisionScope scope(kDefaultPrecisionBits);
    const auto c = p_coefficients(spec);
    REQUIRE(c.size() == 13);
    CHECK(c[0] == Real(spec.a));
    for (std::size_t j = 1; j < c.size(); ++j) CHECK(c[j] == 1);

    // f_inf(x) = (1 - e^{-r0 tau}) p(e^{r0 tau} x), matched against the generic limit.
    const auto f = flat_infinite_vol_coefficients(0.05, 0.25, 12);
    const auto generic = infinite_vol_limit(testing::flat(0.05, 13, 0.25), 0);
    REQUIRE(generic.coeffs.size() == f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
        CHECK(relative_difference(f[j], generic.coeffs[j]) < Real("1e-14"));
    }
    CHECK_THROWS_AS(FlatPolySpec::from_rate(0.0, 0.25, 10), Error);
    CHECK_THROWS_AS(p_coefficients(FlatPolySpec{0.5, 10}), Error);
}

TEST_CASE("zeros of p lie in the Enestrom-Kakeya annulus") {
    PrecisionScope scope(kDefaultPrecisionBits);
    for (std::size_t n : {9u, 20u, 40u}) {
        const FlatPolySpec spec{80.0, n};
        const auto rs = p_roots(spec);
        REQUIRE(rs.degree() == n);
        for (const auto& z : rs.roots) {
            CHECK(abs(z) >= 1);
            CHECK(abs(z) <= Real(80));
        }
    }
}

TEST_CASE("polar curve carries the zeros") {
    for (std::size_t n : {9u, 20u, 40u}) {
        const FlatPolySpec spec{80.0, n};
        for (double theta = 0.3; theta < M_PI; theta += 0.2) {
            const auto rho = rho_curve(spec, theta);
            REQUIRE(rho.has_value());
            const double lhs = std::pow(*rho, 2.0 * static_cast<double>(n + 1));
            const double rhs = (spec.a - 1) * (spec.a - 1) * *rho * *rho -
                               2 * spec.a * (spec.a - 1) * *rho * std::cos(theta) +
                               spec.a * spec.a;
            CHECK(std::abs(lhs - rhs) / rhs <= 1e-10);
            CHECK(*rho > 1);
        }
        // Every zero satisfies |p(z)| = 0, so it lies on the curve at its own angle.
        PrecisionScope scope(kDefaultPrecisionBits);
        for (const auto& z : p_roots(spec).roots) {
            const double theta = std::abs(dbl(arg(z)));
            if (theta < 0.2) continue;
            const auto rho = rho_curve(spec, theta);
            REQUIRE(rho.has_value());
            CHECK(std::abs(*rho - dbl(abs(z))) < 1e-8);
        }
    }
}

TEST_CASE("real-axis cases of the curve") {
    const auto two = real_axis_cases(kA80);
    CHECK(two.kind == RealAxisCase::TwoSolutions);
    REQUIRE(two.solutions.size() == 2);
    for (double r : two.solutions) CHECK(std::abs(h(kA80, r)) < 1e-9 * kA80.a);
    CHECK(two.solutions[0] < two.rho_star);
    CHECK(two.rho_star < two.solutions[1]);
    CHECK(two.rho_star == doctest::Approx(std::pow(79.0 / 10.0, 1.0 / 9.0)).epsilon(1e-14));
    CHECK(two.h_at_rho_star < 0);
    REQUIRE(two.quadratic_approximation.size() == 2);
    for (int k = 0; k < 2; ++k) {
        CHECK(std::abs(two.quadratic_approximation[k] - two.solutions[k]) / two.solutions[k] <
              0.05);
    }

    const auto none = real_axis_cases(FlatPolySpec{80.0, 30});
    CHECK(none.kind == RealAxisCase::NoSolution);
    CHECK(none.solutions.empty());
    CHECK(none.h_at_rho_star > 0);
    CHECK_FALSE(rho_curve(FlatPolySpec{80.0, 30}, 0.0).has_value());
}

TEST_CASE("n-star boundary") {
    const auto s = n_star(80.0);
    CHECK(s.boundary == 22);
    CHECK(s.value > 21);
    CHECK(s.value <= 22);
    // Two real solutions below the boundary, none from it on.
    CHECK(real_axis_cases(FlatPolySpec{80.0, 21}).kind == RealAxisCase::TwoSolutions);
    CHECK(real_axis_cases(FlatPolySpec{80.0, 22}).kind == RealAxisCase::NoSolution);
    for (double a : {5.0, 80.0, 500.0}) {
        CAPTURE(a);
        const auto ns = n_star(a);
        const auto below = static_cast<std::size_t>(ns.boundary - 1);
        if (below >= 1) {
            CHECK(real_axis_cases(FlatPolySpec{a, below}).kind == RealAxisCase::TwoSolutions);
        }
        CHECK(real_axis_cases(FlatPolySpec{a, ns.boundary}).kind == RealAxisCase::NoSolution);
        const double v = ns.value;
        const double lhs = v * std::log(a / v);
        const double rhs = (v + 1) * std::log((a - 1) / (v + 1));
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::abs(lhs));
    }
    CHECK(n_star(5.0).value < n_star(80.0).value);
    CHECK(n_star(80.0).value < n_star(500.0).value);
    CHECK_THROWS_AS(n_star(1.0), Error);
}

TEST_CASE("one zero per angular interval") {
    const auto counts = angular_check(FlatPolySpec{80.0, 10});
    REQUIRE(counts.upper.size() == 5);
    REQUIRE(counts.lower.size() == 5);
    for (auto c : counts.upper) CHECK(c == 1);
    for (auto c : counts.lower) CHECK(c == 1);
    CHECK(counts.one_per_interval);
    CHECK_THROWS_AS(angular_check(FlatPolySpec{80.0, 9}), Error);
}

TEST_CASE("zeros of a + z^n approximate the zeros of p") {
    PrecisionScope scope(kDefaultPrecisionBits);
    double previous = 1;
    for (std::size_t n : {10u, 20u, 40u}) {
        CAPTURE(n);
        const FlatPolySpec spec{80.0, n};
        const auto approx = zeros_approx(spec);
        REQUIRE(approx.size() == n);
        const double radius = std::pow(80.0, 1.0 / static_cast<double>(n));
        for (const auto& w : approx) CHECK(std::abs(dbl(abs(w)) - radius) < 1e-12);

        // Same angular intervals as the exact zeros.
        RootSet as_set;
        as_set.roots = approx;
        const auto counts = angular_check(spec, as_set);
        CHECK(counts.one_per_interval);

        // Worst modulus mismatch sits next to the real axis and shrinks with n.
        double worst = 0;
        for (const auto& z : p_roots(spec).roots) {
            worst = std::max(worst, std::abs(dbl(abs(z)) / radius - 1));
        }
        CHECK(worst < previous);
        CHECK(worst < 0.09);
        previous = worst;
    }
}

TEST_CASE("zeros approach the unit circle as the degree grows") {
    PrecisionScope scope(kDefaultPrecisionBits);
    double previous = 1e9;
    for (std::size_t n : {10u, 20u, 40u, 80u, 160u}) {
        double sum = 0;
        const auto rs = p_roots(FlatPolySpec{80.0, n});
        for (const auto& z : rs.roots) sum += std::log(dbl(abs(z)));
        const double mean_log = sum / static_cast<double>(n);
        // The mean of log|z| equals log(a) / n exactly (product of the zeros is a).
        CHECK(mean_log == doctest::Approx(std::log(80.0) / static_cast<double>(n)).epsilon(1e-12));
        CHECK(mean_log < previous);
        previous = mean_log;
    }
}

TEST_CASE("critical-volatility formula") {
    const std::size_t n = 20;
    std::size_t argmin = 0;
    double best = 1e9;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto f = critical_vol_formula(0.05, 0.25, n, i);
        if (f.simplified < best) {
            best = f.simplified;
            argmin = i;
        }
    }
    CHECK(std::abs(static_cast<double>(argmin) - static_cast<double>(n / 2)) <= 1.0);
    CHECK(max_volatility(0.05, 5.0, 0.25) == doctest::Approx(0.4187).epsilon(1e-3));
    CHECK(round_half_even(100 * max_volatility(0.05, 5.0, 0.25), 2) == 41.87);
    CHECK(max_volatility(0.05, 5.0, 0.25) <= best);

    const auto f = critical_vol_formula(0.05, 0.25, 20, 10);
    REQUIRE(f.exact.has_value());
    const double psi = *f.exact;
    CHECK(std::exp(0.05 * 0.25 + psi * psi * 2.5) ==
          doctest::Approx(std::pow(1 / (1 - std::exp(-0.0125)), 1.0 / 9)).epsilon(1e-12));
    CHECK(f.simplified == doctest::Approx(std::sqrt(std::log(80.0) / (10 * 9 * 0.25))).epsilon(1e-12));

    CHECK_THROWS_AS(critical_vol_formula(0.05, 0.25, 20, 0), Error);
    CHECK_THROWS_AS(critical_vol_formula(0.05, 0.25, 20, 19), Error);
}

TEST_CASE("critical volatility is invariant under time rescaling") {
    for (double lambda : {0.5, 2.0, 4.0}) {
        CAPTURE(lambda);
        const auto base = critical_vol_formula(0.05, 0.25, 20, 10);
        const auto scaled = critical_vol_formula(0.05 / lambda, 0.25 * lambda, 20, 10);
        CHECK(*scaled.exact * std::sqrt(lambda) == doctest::Approx(*base.exact).epsilon(1e-12));
        CHECK(scaled.simplified * std::sqrt(lambda) == doctest::Approx(base.simplified).epsilon(1e-12));
        CHECK(max_volatility(0.05 / lambda, 5.0 * lambda, 0.25 * lambda) * std::sqrt(lambda) ==
              doctest::Approx(max_volatility(0.05, 5.0, 0.25)).epsilon(1e-12));
    }
    // The full model agrees: psi_cr scales by 1 / sqrt(lambda).
    const auto m = testing::flat(0.05, 20, 0.25);
    PrecisionScope scope(m.precision_bits());
    const auto base = critical_volatility(m, 10, 0.3, 0.8);
    const auto scaled = critical_volatility(scale(m, Real(4)), 10, 0.15, 0.4);
    CHECK(std::abs(scaled.psi_cr * 2 - base.psi_cr) < 4 * kCriticalTolerance);
}

TEST_CASE("table of maximum volatilities") {
    const auto rows = table1_default();
    const auto& published = oracle::published_table();
    REQUIRE(rows.size() == published.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CAPTURE(k);
        CHECK(std::abs(rows[k].psi_max_percent - published[k]) <= 0.01 + 1e-9);
        CHECK(rows[k].psi_max_percent == round_half_even(100 * rows[k].psi_max, 2));
    }
    CHECK(rows.front().r0 == 0.01);
    CHECK(rows.front().t_n == 5.0);
    CHECK(rows.front().tau == 0.25);
    CHECK(rows.back().r0 == 0.05);
    CHECK(rows.back().t_n == 30.0);
    CHECK(rows.back().tau == 0.5);
    CHECK_THROWS_AS(max_volatility(0.05, 5.0, 0.3), Error);

    const auto csv = table1_csv(rows);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
    const auto md = table1_markdown(rows);
    CHECK(md.find("41.87") != std::string::npos);
    CHECK(round_half_even(0.125, 2) == 0.12);
    CHECK(round_half_even(0.135, 2) == 0.14);
}
