#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>

namespace mfm {

/// Arbitrary-precision real. The mantissa width of newly created values is
/// the process-wide working precision (see PrecisionScope).
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

inline constexpr unsigned kDefaultPrecisionBits = 240;
inline constexpr unsigned kMinPrecisionBits = 64;

/// Decimal digits requested from the backend so that the binary mantissa is
/// at least `bits` wide.
unsigned digits10_for_bits(unsigned bits);

/// Working precision currently in effect, in bits.
unsigned working_precision_bits();

/// Sets the working precision for the lifetime of the object and restores
/// the previous one on destruction. The setting is process-wide: open the
/// scope before spawning workers and do not change it while they run.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();

    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned previous_digits10_;
    bool changed_;
};

/// Copy of `x` rounded to a mantissa of at least `bits` bits.
Real rounded_to(const Real& x, unsigned bits);

/// Scientific-notation decimal string. `digits == 0` prints every digit the
/// value's precision supports (plus two guard digits).
std::string to_decimal(const Real& x, int digits = 0);

/// Parses a decimal string at the current working precision.
Real parse_real(std::string_view text);

/// Relative difference |a - b| / max(|a|, |b|), zero when both vanish.
Real relative_difference(const Real& a, const Real& b);

/// 10^(-bits/divisor), the tolerance family used by the invariant checks.
Real precision_tolerance(unsigned bits, unsigned divisor);

/// Complex number over Real; only the arithmetic the root finder needs.
struct Complex {
    Real re;
    Real im;

    Complex() : re(0), im(0) {}
    Complex(Real r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complex& operator*=(const Complex& o) {
        Real r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    Complex& operator/=(const Complex& o);

    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
    friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
};

Real abs(const Complex& z);
Real norm(const Complex& z);
Real arg(const Complex& z);
Complex conj(const Complex& z);
Complex polar(const Real& modulus, const Real& angle);

Real pi();

}  // namespace mfm
