#include "liftcount/numeric.hpp"

#include <quadmath.h>

#include <array>

#include <boost/math/constants/constants.hpp>

namespace liftcount {

qcomplex& qcomplex::operator/=(const qcomplex& o) {
    // Smith's algorithm avoids overflow in |o|^2.
    using boost::multiprecision::abs;
    if (abs(o.re) >= abs(o.im)) {
        real ratio = o.im / o.re;
        real denom = o.re + o.im * ratio;
        real r = (re + im * ratio) / denom;
        im = (im - re * ratio) / denom;
        re = r;
    } else {
        real ratio = o.re / o.im;
        real denom = o.re * ratio + o.im;
        real r = (re * ratio + im) / denom;
        im = (im * ratio - re) / denom;
        re = r;
    }
    return *this;
}

qcomplex conj(const qcomplex& z) { return {z.re, -z.im}; }

real abs(const qcomplex& z) { return boost::multiprecision::hypot(z.re, z.im); }

bool is_finite(const qcomplex& z) {
    return boost::multiprecision::isfinite(z.re) && boost::multiprecision::isfinite(z.im);
}

qcomplex ipow(qcomplex z, std::uint64_t e) {
    qcomplex result(1);
    while (e != 0) {
        if (e & 1U) result *= z;
        e >>= 1U;
        if (e != 0) z *= z;
    }
    return result;
}

qcomplex expi(const real& theta) {
    return {boost::multiprecision::cos(theta), boost::multiprecision::sin(theta)};
}

qcomplex unit_root(std::int64_t num, std::int64_t den, int sign) {
    if (den <= 0) throw std::invalid_argument("unit_root: non-positive period");
    std::int64_t r = num % den;
    if (r < 0) r += den;
    if (r == 0) return qcomplex(1);
    if (2 * r == den) return qcomplex(-1);
    static const real two_pi = 2 * boost::math::constants::pi<real>();
    real theta = two_pi * real(r) / real(den);
    return expi(sign < 0 ? real(-theta) : theta);
}

const real& overflow_bound() {
    static const real bound("1e4900");
    return bound;
}

void check_magnitude(const qcomplex& z, const char* where) {
    if (!is_finite(z) || abs(z) > overflow_bound()) {
        throw overflow_error(std::string(where) + ": intermediate magnitude exceeds " +
                             format_number(overflow_bound()));
    }
}

std::string format_number(const real& x) {
    __float128 v = x.backend().value();
    if (v == 0) v = 0;  // drop the sign of negative zero
    std::array<char, 64> buf{};
    quadmath_snprintf(buf.data(), buf.size(), "%.12Qg", v);
    return buf.data();
}

std::string format_number(double x) { return format_number(real(x)); }

real relative_error(const qcomplex& a, const qcomplex& b) {
    return abs(a - b) / (1 + abs(b));
}

}  // namespace liftcount
