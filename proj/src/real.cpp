#include "mfm/real.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <ios>

namespace mfm {

unsigned digits10_for_bits(unsigned bits) {
    // log10(2) rounded up so the backend never allocates fewer bits.
    return static_cast<unsigned>(std::ceil(bits * 0.30103)) + 1;
}

unsigned working_precision_bits() {
    return static_cast<unsigned>(
        boost::multiprecision::detail::digits10_2_2(Real::default_precision()));
}

PrecisionScope::PrecisionScope(unsigned bits)
    : previous_digits10_(Real::default_precision()), changed_(false) {
    unsigned wanted = digits10_for_bits(bits);
    if (wanted != previous_digits10_) {
        Real::default_precision(wanted);
        changed_ = true;
    }
    // Boost's per-call precision guards compare against value.precision(); use
    // the round-tripped digit count so those guards never write the global.
    wanted = Real(1).precision();
    if (wanted != Real::default_precision()) {
        Real::default_precision(wanted);
        changed_ = true;
    }
}

PrecisionScope::~PrecisionScope() {
    if (changed_) Real::default_precision(previous_digits10_);
}

Real rounded_to(const Real& x, unsigned bits) { return Real(x, digits10_for_bits(bits)); }

std::string to_decimal(const Real& x, int digits) {
    if (digits <= 0) digits = static_cast<int>(x.precision()) + 2;
    return x.str(digits, std::ios_base::scientific);
}

Real parse_real(std::string_view text) { return Real(std::string(text)); }

Real relative_difference(const Real& a, const Real& b) {
    const Real scale = std::max(boost::multiprecision::abs(a), boost::multiprecision::abs(b));
    if (scale == 0) return Real(0);
    return boost::multiprecision::abs(a - b) / scale;
}

Real precision_tolerance(unsigned bits, unsigned divisor) {
    return boost::multiprecision::pow(Real(10), -Real(bits) / divisor);
}

Complex& Complex::operator/=(const Complex& o) {
    const Real d = o.re * o.re + o.im * o.im;
    Real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
}

Real abs(const Complex& z) { return boost::multiprecision::sqrt(norm(z)); }

Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }

Real arg(const Complex& z) { return boost::multiprecision::atan2(z.im, z.re); }

Complex conj(const Complex& z) { return {z.re, -z.im}; }

Complex polar(const Real& modulus, const Real& angle) {
    return {modulus * boost::multiprecision::cos(angle), modulus * boost::multiprecision::sin(angle)};
}

Real pi() { return boost::math::constants::pi<Real>(); }

}  // namespace mfm
