#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/float128.hpp>

namespace liftcount {

/// Extended real used on every lifted and spectral path. binary128 gives
/// ~34 significant digits and an exponent range of about 1e+-4932.
using real = boost::multiprecision::float128;

/// Magnitudes above this (1e4900) are reported as overflow instead of
/// becoming inf.
const real& overflow_bound();

/// Raised when a lifted sum leaves the representable range.
struct overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Complex number over `real`. std::complex is unspecified for non-builtin
/// element types, so this is a minimal value type with the operations the
/// engine needs.
struct qcomplex {
    real re = 0;
    real im = 0;

    qcomplex() = default;
    qcomplex(real r) : re(std::move(r)) {}  // NOLINT(implicit)
    qcomplex(double r) : re(r) {}           // NOLINT(implicit)
    qcomplex(int r) : re(r) {}              // NOLINT(implicit)
    qcomplex(real r, real i) : re(std::move(r)), im(std::move(i)) {}
    explicit qcomplex(std::complex<double> z) : re(z.real()), im(z.imag()) {}

    qcomplex& operator+=(const qcomplex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    qcomplex& operator-=(const qcomplex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    qcomplex& operator*=(const qcomplex& o) {
        real r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    qcomplex& operator/=(const qcomplex& o);

    friend qcomplex operator+(qcomplex a, const qcomplex& b) { return a += b; }
    friend qcomplex operator-(qcomplex a, const qcomplex& b) { return a -= b; }
    friend qcomplex operator*(qcomplex a, const qcomplex& b) { return a *= b; }
    friend qcomplex operator/(qcomplex a, const qcomplex& b) { return a /= b; }
    friend qcomplex operator-(const qcomplex& a) { return {-a.re, -a.im}; }
    friend bool operator==(const qcomplex& a, const qcomplex& b) {
        return a.re == b.re && a.im == b.im;
    }

    std::complex<double> to_std() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }
};

qcomplex conj(const qcomplex& z);
real abs(const qcomplex& z);
bool is_finite(const qcomplex& z);

/// z^e by repeated squaring.
qcomplex ipow(qcomplex z, std::uint64_t e);

/// exp(i*theta).
qcomplex expi(const real& theta);

/// exp(sign * 2*pi*i * num / den) with num reduced modulo den before the
/// angle is formed, so large index products stay exact.
qcomplex unit_root(std::int64_t num, std::int64_t den, int sign = -1);

/// Throws overflow_error if z is non-finite or exceeds overflow_bound().
void check_magnitude(const qcomplex& z, const char* where);

/// 12 significant digits, lowercase exponent; negative zero prints as 0.
std::string format_number(const real& x);
std::string format_number(double x);

/// |a - b| / (1 + |b|).
real relative_error(const qcomplex& a, const qcomplex& b);

}  // namespace liftcount
