#include "mfm/errors.hpp"
#include "mfm/model.hpp"
#include "mfm/solver.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mfm;
using testing::dbl;

TEST_CASE("flat curve discounts and dates") {
    PrecisionScope scope(kDefaultPrecisionBits);
    const auto m = testing::flat(0.05, 20, 0.25);
    CHECK(m.steps() == 20);
    CHECK(m.dates()[0] == 0);
    CHECK(m.discounts()[0] == 1);
    const Real pn = m.discounts().back();
    CHECK(relative_difference(pn, exp(Real(-0.25) * Real(1))) < Real("1e-70"));

    const auto zero = testing::flat(0.0, 20, 0.25);
    for (const auto& p : zero.discounts()) CHECK(p == 1);
}

TEST_CASE("flat curve rejects bad inputs") {
    CHECK_THROWS_AS(flat_curve(0.05, 1, 0.25), Error);
    CHECK_THROWS_AS(flat_curve(0.05, 20, 0.0), Error);
    CHECK_THROWS_AS(flat_curve(0.05, 20, -0.25), Error);
    try {
        flat_curve(0.05, 20, 0.0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidInput);
    }
}

TEST_CASE("tenor model invariants are enforced") {
    PrecisionScope scope(kDefaultPrecisionBits);
    using V = std::vector<Real>;
    CHECK_THROWS_AS(TenorModel(V{0, 1}, V{1, Real("0.9")}, Real(0), 32), Error);
    CHECK_THROWS_AS(TenorModel(V{0, 1, 1}, V{1, Real("0.9"), Real("0.8")}, Real(0)), Error);
    CHECK_THROWS_AS(TenorModel(V{0, 1}, V{1, Real(0)}, Real(0)), Error);
    CHECK_THROWS_AS(TenorModel(V{Real("0.1"), 1}, V{1, Real("0.9")}, Real(0)), Error);
    CHECK_THROWS_AS(TenorModel(V{0, 1}, V{Real("0.99"), Real("0.9")}, Real(0)), Error);
    CHECK_THROWS_AS(TenorModel(V{0, 1}, V{1, Real("0.9")}, Real(-1)), Error);
    CHECK_NOTHROW(TenorModel(V{0, 1}, V{1, Real("0.9")}, Real(0), 64));
}

TEST_CASE("rebased curve") {
    PrecisionScope scope(kDefaultPrecisionBits);
    const auto m = testing::flat(0.05, 20, 0.25);
    const auto c = rebase(m);
    CHECK(c.values.back() == 1);
    CHECK(relative_difference(c.values[0], exp(Real("0.25"))) < Real("1e-70"));
    for (std::size_t i = 0; i <= 20; ++i) {
        const Real expected = exp(Real("0.05") * Real("0.25") * static_cast<unsigned long>(20 - i));
        CHECK(relative_difference(c.values[i], expected) < Real("1e-70"));
    }
    // Rebasing again divides by P^_0n = 1 and changes nothing.
    for (const auto& v : c.values) CHECK(v / c.values.back() == v);
}

TEST_CASE("rebased curve from a file matches elementwise division") {
    std::istringstream in("t,P\n0,1\n0.5,0.98\n1.0,0.955\n1.5,0.93\n2.0,0.9\n");
    const auto m = read_curve_csv(in);
    const auto c = rebase(m);
    const double p[] = {1, 0.98, 0.955, 0.93, 0.9};
    for (int i = 0; i < 5; ++i) CHECK(std::abs(dbl(c.values[i]) - p[i] / 0.9) < 1e-12);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(relative_difference(c.values[i] / c.values[j],
                                      m.discounts()[i] / m.discounts()[j]) < Real("1e-70"));
        }
    }
}

TEST_CASE("forward libors") {
    PrecisionScope scope(kDefaultPrecisionBits);
    const auto m = testing::flat(0.05, 20, 0.25);
    const auto fwd = forward_libors(m);
    const Real expected = (exp(Real("0.05") * Real("0.25")) - 1) / Real("0.25");
    for (const auto& l : fwd) CHECK(relative_difference(l, expected) < Real("1e-70"));

    std::istringstream in("t,P\n0,1\n0.5,0.99\n1.5,0.95\n2.0,0.9\n");
    const auto curve = read_curve_csv(in);
    const auto f2 = forward_libors(curve);
    const double p[] = {1, 0.99, 0.95, 0.9};
    const double t[] = {0, 0.5, 1.5, 2.0};
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(dbl(f2[j]) - (p[j] / p[j + 1] - 1) / (t[j + 1] - t[j])) < 1e-14);
    }
}

TEST_CASE("zero rates") {
    const auto m = testing::flat(0.05, 4, 0.5);
    const auto r = m.zero_rates();
    CHECK(std::isnan(dbl(r[0])));
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(std::abs(dbl(r[i]) - 0.05) < 1e-15);
}

TEST_CASE("scale transformation") {
    PrecisionScope scope(kDefaultPrecisionBits);
    const auto m = testing::flat(0.05, 20, 0.25, "0.3");
    const auto same = scale(m, Real(1));
    for (std::size_t i = 0; i <= 20; ++i) {
        CHECK(same.dates()[i] == m.dates()[i]);
        CHECK(same.discounts()[i] == m.discounts()[i]);
    }
    CHECK(same.psi() == m.psi());

    const auto s = scale(m, Real(4));
    CHECK(relative_difference(s.psi(), Real("0.15")) < Real("1e-70"));
    const auto r = m.zero_rates();
    const auto rs = s.zero_rates();
    for (std::size_t i = 1; i <= 20; ++i) {
        CHECK(relative_difference(rs[i] * 4, r[i]) < Real("1e-70"));
        CHECK(s.dates()[i] == m.dates()[i] * 4);
    }
    CHECK_THROWS_AS(scale(m, Real(0)), Error);
    CHECK_THROWS_AS(scale(m, Real(-2)), Error);
}

TEST_CASE("flat detection") {
    FlatParameters p;
    CHECK(is_flat(testing::flat(0.03, 10, 0.5), &p));
    CHECK(std::abs(dbl(p.r0) - 0.03) < 1e-15);
    CHECK(std::abs(dbl(p.tau) - 0.5) < 1e-15);
    std::istringstream in("t,P\n0,1\n0.5,0.99\n1.0,0.97\n");
    CHECK_FALSE(is_flat(read_curve_csv(in)));
}

TEST_CASE("curve csv parsing") {
    {
        std::istringstream in("t,P\n0,1\n1,0.9\n1,0.8\n");
        CHECK_THROWS_AS(read_curve_csv(in), Error);
    }
    {
        std::istringstream in("time,price\n0,1\n1,0.9\n");
        CHECK_THROWS_AS(read_curve_csv(in), Error);
    }
    {
        std::istringstream in("t,P\n0,1\n1,abc\n");
        try {
            read_curve_csv(in);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::InvalidInput);
        }
    }
    {
        const auto m = testing::flat(0.05, 8, 0.25);
        std::ostringstream out;
        write_curve_csv(out, m);
        std::istringstream in(out.str());
        const auto back = read_curve_csv(in);
        REQUIRE(back.steps() == 8);
        for (std::size_t i = 0; i <= 8; ++i) {
            CHECK(relative_difference(back.discounts()[i], m.discounts()[i]) < Real("1e-70"));
            CHECK(back.dates()[i] == m.dates()[i]);
        }
    }
}

TEST_CASE("precision scope restores the previous setting") {
    const unsigned before = working_precision_bits();
    {
        PrecisionScope scope(512);
        CHECK(working_precision_bits() >= 512);
        Real x(1);
        CHECK(x.precision() == Real::default_precision());
    }
    CHECK(working_precision_bits() == before);
    PrecisionScope scope(240);
    CHECK(working_precision_bits() >= 240);
    CHECK(working_precision_bits() < 260);
}
