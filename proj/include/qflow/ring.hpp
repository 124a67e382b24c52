#pragma once

// Coefficient rings used by the series engine.
//
// Every ring R used as a series coefficient provides a specialization of
// ring_traits<R> with the members below. Exact rings compare with ==; the
// floating ring treats exact zero as zero and nothing else.
//
//   zero(), one(), from_int(long)
//   is_zero(a), is_unit(a), inverse(a)       (inverse throws NotAUnit)
//   magnitude(a)        a real size used for pivot choice
//   to_complex(a)       numeric value as std::complex<long double>
//   log_abs(a)          log|a| without overflow, -inf for zero
//   to_string(a)        canonical text
//   exact, numeric      compile-time flags

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "qflow/errors.hpp"

namespace qflow {

using Rational = mpq_class;
using Complex = std::complex<double>;
using ComplexLD = std::complex<long double>;

/// Exponent tuple I = (i_1, ..., i_N) for the monomial y^I.
using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& idx) {
    int d = 0;
    for (int i : idx) d += i;
    return d;
}

/// Gaussian rational re + i*im with exact components.
struct Gaussian {
    Rational re;
    Rational im;

    Gaussian() = default;
    Gaussian(Rational r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
    Gaussian(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    Gaussian(long r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)

    Rational norm_sq() const { return Rational(re * re + im * im); }
    Gaussian conj() const { return {re, Rational(-im)}; }

    friend bool operator==(const Gaussian& a, const Gaussian& b) { return a.re == b.re && a.im == b.im; }
    friend Gaussian operator+(const Gaussian& a, const Gaussian& b) {
        return {Rational(a.re + b.re), Rational(a.im + b.im)};
    }
    friend Gaussian operator-(const Gaussian& a, const Gaussian& b) {
        return {Rational(a.re - b.re), Rational(a.im - b.im)};
    }
    friend Gaussian operator-(const Gaussian& a) { return {Rational(-a.re), Rational(-a.im)}; }
    friend Gaussian operator*(const Gaussian& a, const Gaussian& b) {
        return {Rational(a.re * b.re - a.im * b.im), Rational(a.re * b.im + a.im * b.re)};
    }
    Gaussian& operator+=(const Gaussian& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Gaussian& operator-=(const Gaussian& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Gaussian& operator*=(const Gaussian& o) { return *this = *this * o; }
};

// Helpers shared by the exact traits.
ComplexLD rational_to_ld(const Rational& a);
long double rational_log_abs(const Rational& a);
Rational parse_rational(const std::string& text);
std::string to_shortest(double v);

template <class R>
struct ring_traits;

template <>
struct ring_traits<Rational> {
    static constexpr bool exact = true;
    static constexpr bool numeric = true;
    static const char* name() { return "rational"; }
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static Rational from_int(long v) { return Rational(v); }
    static bool is_zero(const Rational& a) { return sgn(a) == 0; }
    static bool is_unit(const Rational& a) { return sgn(a) != 0; }
    static Rational inverse(const Rational& a) {
        if (sgn(a) == 0) throw NotAUnit("zero rational");
        return Rational(1 / a);
    }
    static long double magnitude(const Rational& a) { return std::abs(rational_to_ld(a).real()); }
    static ComplexLD to_complex(const Rational& a) { return rational_to_ld(a); }
    static long double log_abs(const Rational& a) { return rational_log_abs(a); }
    static std::string to_string(const Rational& a) { return a.get_str(); }
};

template <>
struct ring_traits<Gaussian> {
    static constexpr bool exact = true;
    static constexpr bool numeric = true;
    static const char* name() { return "gaussian"; }
    static Gaussian zero() { return Gaussian(0L); }
    static Gaussian one() { return Gaussian(1L); }
    static Gaussian from_int(long v) { return Gaussian(v); }
    static bool is_zero(const Gaussian& a) { return sgn(a.re) == 0 && sgn(a.im) == 0; }
    static bool is_unit(const Gaussian& a) { return !is_zero(a); }
    static Gaussian inverse(const Gaussian& a) {
        if (is_zero(a)) throw NotAUnit("zero gaussian rational");
        Rational n = a.norm_sq();
        return {Rational(a.re / n), Rational(-a.im / n)};
    }
    static long double magnitude(const Gaussian& a) { return std::abs(to_complex(a)); }
    static ComplexLD to_complex(const Gaussian& a) {
        return {rational_to_ld(a.re).real(), rational_to_ld(a.im).real()};
    }
    static long double log_abs(const Gaussian& a) {
        if (is_zero(a)) return -std::numeric_limits<long double>::infinity();
        return 0.5L * rational_log_abs(a.norm_sq());
    }
    static std::string to_string(const Gaussian& a) { return a.re.get_str() + ";" + a.im.get_str(); }
};

template <>
struct ring_traits<Complex> {
    static constexpr bool exact = false;
    static constexpr bool numeric = true;
    static const char* name() { return "float"; }
    static Complex zero() { return {0.0, 0.0}; }
    static Complex one() { return {1.0, 0.0}; }
    static Complex from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static bool is_zero(const Complex& a) { return a == Complex(0.0, 0.0); }
    static bool is_unit(const Complex& a) { return std::isfinite(std::abs(a)) && !is_zero(a); }
    static Complex inverse(const Complex& a) {
        if (!is_unit(a)) throw NotAUnit("zero complex");
        return 1.0 / a;
    }
    static long double magnitude(const Complex& a) { return std::abs(a); }
    static ComplexLD to_complex(const Complex& a) { return {a.real(), a.imag()}; }
    static long double log_abs(const Complex& a) {
        if (is_zero(a)) return -std::numeric_limits<long double>::infinity();
        return std::log(static_cast<long double>(std::abs(a)));
    }
    static std::string to_string(const Complex& a) { return to_shortest(a.real()) + ";" + to_shortest(a.imag()); }
};

/// Integer power of a ring element, k >= 0.
template <class R>
R ring_pow(const R& base, long k) {
    R result = ring_traits<R>::one();
    R b = base;
    while (k > 0) {
        if (k & 1) result = R(result * b);
        k >>= 1;
        if (k > 0) b = R(b * b);
    }
    return result;
}

/// Dense N x N matrix over R, row-major.
template <class R>
struct Matrix {
    int n = 0;
    std::vector<R> a;

    Matrix() = default;
    explicit Matrix(int size) : n(size), a(static_cast<size_t>(size) * size, ring_traits<R>::zero()) {}

    static Matrix identity(int size) {
        Matrix m(size);
        for (int i = 0; i < size; ++i) m(i, i) = ring_traits<R>::one();
        return m;
    }

    R& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const R& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

/// Gauss-Jordan inverse. Pivots must be units of R; for the float ring the
/// largest-magnitude pivot is chosen.
template <class R>
Matrix<R> invert(const Matrix<R>& m) {
    using T = ring_traits<R>;
    const int n = m.n;
    Matrix<R> w = m;
    Matrix<R> inv = Matrix<R>::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        long double best = -1;
        for (int r = col; r < n; ++r) {
            if (!T::is_unit(w(r, col))) continue;
            if constexpr (T::exact) {
                piv = r;
                break;
            } else {
                long double mag = T::magnitude(w(r, col));
                if (mag > best) {
                    best = mag;
                    piv = r;
                }
            }
        }
        if (piv < 0) throw NotAUnit("singular matrix");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(w(col, j), w(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        }
        R pinv = T::inverse(w(col, col));
        for (int j = 0; j < n; ++j) {
            w(col, j) = R(w(col, j) * pinv);
            inv(col, j) = R(inv(col, j) * pinv);
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || T::is_zero(w(r, col))) continue;
            R f = w(r, col);
            for (int j = 0; j < n; ++j) {
                w(r, j) = R(w(r, j) - f * w(col, j));
                inv(r, j) = R(inv(r, j) - f * inv(col, j));
            }
        }
    }
    return inv;
}

}  // namespace qflow
