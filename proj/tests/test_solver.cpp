#include "mfm/errors.hpp"
#include "mfm/genfunc.hpp"
#include "mfm/quadrature.hpp"
#include "mfm/solver.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mfm;
using testing::big;
using testing::dbl;

namespace {

oracle::Solution oracle_for(const TenorModel& m) {
    std::vector<oracle::Big> dates;
    std::vector<oracle::Big> rebased;
    for (const auto& t : m.dates()) dates.push_back(big(t));
    for (const auto& p : m.discounts()) rebased.push_back(big(p) / big(m.discounts().back()));
    return oracle::solve(dates, rebased, big(m.psi()));
}

}  // namespace

TEST_CASE("solver matches the martingale-definition oracle") {
    for (const char* psi : {"0", "0.2", "0.53", "1.0"}) {
        CAPTURE(psi);
        const auto m = testing::flat(0.05, 20, 0.25, psi);
        const auto s = solve(m);
        const auto o = oracle_for(m);
        for (std::size_t i = 0; i < 20; ++i) {
            REQUIRE(s.coeffs.row(i).size() == o.c[i].size());
            for (std::size_t j = 0; j < o.c[i].size(); ++j) {
                CHECK(oracle::relative(big(s.coeffs.at(i, j)), o.c[i][j]) < 1e-60);
            }
            CHECK(oracle::relative(big(s.adjusted_libors[i]), o.libor_tilde[i]) < 1e-60);
            CHECK(oracle::relative(big(s.expectations[i]), o.n_expect[i]) < 1e-60);
        }
    }
}

TEST_CASE("solver on an uneven curve matches the oracle") {
    std::istringstream in("t,P\n0,1\n0.25,0.991\n0.75,0.97\n1.0,0.962\n2.0,0.92\n2.5,0.895\n");
    const auto m = read_curve_csv(in, Real("0.35"));
    const auto s = solve(m);
    const auto o = oracle_for(m);
    for (std::size_t i = 0; i < m.steps(); ++i) {
        for (std::size_t j = 0; j < o.c[i].size(); ++j) {
            CHECK(oracle::relative(big(s.coeffs.at(i, j)), o.c[i][j]) < 1e-60);
        }
        CHECK(oracle::relative(big(s.adjusted_libors[i]), o.libor_tilde[i]) < 1e-60);
    }
}

TEST_CASE("triangular shape, positivity and initial condition") {
    const auto m = testing::flat(0.05, 20, 0.25, "0.4");
    const auto s = solve(m);
    PrecisionScope scope(m.precision_bits());
    const auto fwd = forward_libors(m);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(s.coeffs.row(i).size() == 20 - i);
        CHECK(s.coeffs.at(i, 0) == 1);
        for (const auto& c : s.coeffs.row(i)) CHECK(c > 0);
        CHECK(s.adjusted_libors[i] > 0);
        CHECK(s.adjusted_libors[i] <= fwd[i] * (1 + Real("1e-60")));
        CHECK(s.expectations[i] >= s.curve.values[i + 1]);
    }
    CHECK(relative_difference(s.adjusted_libors[19] * s.accruals[19], s.curve.values[19] - 1) <
          Real("1e-70"));
}

TEST_CASE("zero volatility reproduces forward libors and the product formula") {
    const auto m = testing::flat(0.04, 12, 0.5, "0");
    const auto s = solve(m);
    PrecisionScope scope(m.precision_bits());
    const auto fwd = forward_libors(m);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(relative_difference(s.adjusted_libors[i], fwd[i]) < Real("1e-65"));
        const auto z = zero_vol_limit(m, i);
        for (std::size_t j = 0; j < z.coeffs.size(); ++j) {
            CHECK(relative_difference(s.coeffs.at(i, j), z.coeffs[j]) < Real("1e-65"));
        }
    }
}

TEST_CASE("sum rule example") {
    const auto m = testing::flat(0.05, 20, 0.25, "0.3");
    const auto s = solve(m);
    PrecisionScope scope(m.precision_bits());
    Real sum(0);
    for (const auto& c : s.coeffs.row(0)) sum += c;
    CHECK(relative_difference(sum, s.curve.values[1]) < precision_tolerance(240, 4));
    CHECK(max_sum_rule_error(s) < precision_tolerance(240, 4));
    CHECK(max_libor_identity_error(s) < precision_tolerance(240, 4));
}

TEST_CASE("libor dip deepens with volatility and is deepest mid-interval") {
    std::vector<std::vector<double>> curves;
    for (const char* psi : {"0.2", "0.3", "0.4", "0.5"}) {
        const auto s = solve(testing::flat(0.05, 20, 0.25, psi));
        std::vector<double> l;
        for (const auto& x : s.adjusted_libors) l.push_back(dbl(x));
        curves.push_back(l);
    }
    for (std::size_t k = 1; k < curves.size(); ++k) {
        for (std::size_t i = 1; i + 1 < 20; ++i) CHECK(curves[k][i] < curves[k - 1][i]);
    }
    // Below the critical volatility the dip sits near the middle of the tenor.
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& l = curves[k];
        const auto it = std::min_element(l.begin(), l.end());
        const auto argmin = static_cast<std::size_t>(it - l.begin());
        CHECK(argmin >= 8);
        CHECK(argmin <= 11);
        CHECK(l.front() > *it);
        CHECK(l.back() > *it);
    }
    for (const auto& l : curves) CHECK(*std::min_element(l.begin(), l.end()) < l.back());
}

TEST_CASE("negative forward rates are rejected") {
    std::istringstream in("t,P\n0,1\n1,0.95\n2,0.96\n3,0.9\n");
    const auto m = read_curve_csv(in, Real("0.2"));
    try {
        solve(m);
        FAIL("expected negative-forward error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NegativeForward);
    }
    CHECK_THROWS_AS(build_libor_free(m), Error);
}

TEST_CASE("closed-form c1") {
    const auto m = testing::flat(0.05, 20, 0.25, "0.45");
    const auto s = solve(m);
    PrecisionScope scope(m.precision_bits());
    for (std::size_t i = 0; i + 1 < 20; ++i) {
        CHECK(relative_difference(closed_form_c1(s, i), s.coeffs.at(i, 1)) < Real("1e-65"));
    }
    CHECK(relative_difference(closed_form_c1(s, 18), s.curve.values[19] - 1) < Real("1e-65"));
    CHECK_THROWS_AS(closed_form_c1(s, 19), Error);

    const auto m0 = testing::flat(0.05, 20, 0.25, "0");
    const auto s0 = solve(m0);
    const auto fwd = forward_libors(m0);
    Real sum(0);
    for (std::size_t j = 4; j < 20; ++j) sum += fwd[j] * s0.accruals[j];
    CHECK(relative_difference(closed_form_c1(s0, 3), sum) < Real("1e-65"));
}

TEST_CASE("bond reconstruction") {
    const auto m = testing::flat(0.05, 20, 0.25, "0.3");
    const auto s = solve(m);
    PrecisionScope scope(m.precision_bits());
    for (const char* xs : {"-1.5", "0", "0.7", "2.2"}) {
        const Real x(xs);
        CHECK(rebased_bond(s, 7, 20, x) == 1);
        const Real p = bond(s, 9, 10, x);
        CHECK(relative_difference(p, 1 / (1 + libor(s, 9, x) * s.accruals[9])) < Real("1e-65"));
        CHECK(relative_difference(libor(s, 9, x),
                                  s.adjusted_libors[9] *
                                      exp(m.psi() * x - m.psi() * m.psi() * m.dates()[9] / 2)) <
              Real("1e-70"));
    }
    CHECK(relative_difference(libor(s, 9, Real(0)),
                              s.adjusted_libors[9] * exp(-m.psi() * m.psi() * m.dates()[9] / 2)) <
          Real("1e-70"));
    CHECK_THROWS_AS(rebased_bond(s, 10, 9, Real(0)), Error);
    CHECK_THROWS_AS(bond(s, 10, 21, Real(0)), Error);
}

TEST_CASE("rebased bond at slice i equals its one-step expansion") {
    // P^_{10,11}(x) = E[P^_{11,11}(x_11) | x_10 = x], P^_{11,11} = P^_{11,12}(1 + tau L_11).
    const auto m = testing::flat(0.05, 20, 0.25, "0.3");
    const auto s = solve(m);
    const NIntegrand next(s, 11);
    const double dt = 0.25;
    const double psi = 0.3;
    const double t = 11 * 0.25;
    const double lt = dbl(s.adjusted_libors[11] * s.accruals[11]);
    for (const double x : {-1.0, 0.0, 1.3}) {
        const double expected = oracle::gaussian_expectation(
            [&](double y) {
                return std::exp(next.log_bond(y)) * (1 + lt * std::exp(psi * y - 0.5 * psi * psi * t));
            },
            x, dt);
        PrecisionScope scope(m.precision_bits());
        CHECK(std::abs(dbl(one_step_rebased_bond(s, 10, Real(x))) - expected) / expected < 1e-12);
        CHECK(std::abs(dbl(rebased_bond(s, 10, 11, Real(x))) - expected) / expected < 1e-12);
    }
}

TEST_CASE("bond value matches quadrature of the martingale definition") {
    // i = 10, j = 15, n = 20, psi = 0.3 at x = 0:
    // P^_{10,15}(0) = E[P^_{15,15}(x_15) | x_10 = 0], P^_{15,15} = P^_{15,16}(1 + tau L_15).
    const auto m = testing::flat(0.05, 20, 0.25, "0.3");
    const auto s = solve(m);
    const NIntegrand slice15(s, 15);
    const double psi = 0.3;
    const double t15 = 15 * 0.25;
    const double lt = dbl(s.adjusted_libors[15] * s.accruals[15]);
    const double expected = oracle::gaussian_expectation(
        [&](double y) {
            return std::exp(slice15.log_bond(y)) * (1 + lt * std::exp(psi * y - 0.5 * psi * psi * t15));
        },
        0.0, t15 - 10 * 0.25);
    PrecisionScope scope(m.precision_bits());
    const double got = dbl(rebased_bond(s, 10, 15, Real(0)));
    CHECK(std::abs(got - expected) / expected < 1e-12);

    const double bond_expected = expected / dbl(one_step_rebased_bond(s, 10, Real(0)) *
                                                (1 + s.accruals[10] * libor(s, 10, Real(0))));
    CHECK(std::abs(dbl(bond(s, 10, 15, Real(0))) - bond_expected) / bond_expected < 1e-12);
}

TEST_CASE("deterministic limit of bonds") {
    const auto m = testing::flat(0.05, 12, 0.25, "0");
    const auto s = solve(m);
    PrecisionScope scope(m.precision_bits());
    for (const char* xs : {"-2", "0", "3"}) {
        for (std::size_t i = 0; i <= 12; ++i) {
            for (std::size_t j = i; j <= 12; ++j) {
                const Real expected = m.discounts()[j] / m.discounts()[i];
                CHECK(relative_difference(bond(s, i, j, Real(xs)), expected) < Real("1e-65"));
                const Real rebased_expected = m.discounts()[j] / m.discounts()[12];
                if (j < 12) {
                    CHECK(relative_difference(rebased_bond(s, i, j, Real(xs)), rebased_expected) <
                          Real("1e-65"));
                }
            }
        }
        for (std::size_t i = 0; i < 12; ++i) {
            CHECK(relative_difference(libor(s, i, Real(xs)), forward_libors(m)[i]) <
                  Real("1e-65"));
        }
    }
}

TEST_CASE("expected libor equals the convexity-adjusted libor") {
    const auto m = testing::flat(0.05, 20, 0.25, "0.4");
    const auto s = solve(m);
    for (std::size_t i : {1u, 5u, 12u}) {
        const double t = i * 0.25;
        const double expected = oracle::gaussian_expectation(
            [&](double x) {
                PrecisionScope scope(m.precision_bits());
                return dbl(libor(s, i, Real(x)));
            },
            0.0, t, 12);
        CHECK(std::abs(expected - dbl(s.adjusted_libors[i])) / dbl(s.adjusted_libors[i]) < 1e-10);
    }
}

TEST_CASE("psi sweep is identical to sequential solves") {
    const auto m = testing::flat(0.05, 24, 0.25);
    PrecisionScope scope(m.precision_bits());
    std::vector<Real> psis;
    for (const char* p : {"0.1", "0.35", "0.6", "0.9", "1.2"}) psis.emplace_back(p);
    const auto sweep = solve_sweep(m, psis);
    REQUIRE(sweep.size() == psis.size());
    for (std::size_t k = 0; k < psis.size(); ++k) {
        const auto single = solve(m.with_psi(psis[k]));
        for (std::size_t i = 0; i < 24; ++i) {
            CHECK(sweep[k].adjusted_libors[i] == single.adjusted_libors[i]);
            for (std::size_t j = 0; j < single.coeffs.row(i).size(); ++j) {
                CHECK(sweep[k].coeffs.at(i, j) == single.coeffs.at(i, j));
            }
        }
    }
}
