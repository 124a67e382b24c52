#pragma once

// Polynomials in a symbolic q with rational coefficients.

#include <string>
#include <utility>
#include <vector>

#include "qflow/ring.hpp"

namespace qflow {

/// Sparse polynomial sum c_k q^k. Terms are kept sorted by exponent with no
/// stored zeros, so equal polynomials have identical representations.
class QPoly {
public:
    using Term = std::pair<int, Rational>;

    QPoly() = default;
    QPoly(long c);              // NOLINT(google-explicit-constructor)
    QPoly(const Rational& c);   // NOLINT(google-explicit-constructor)
    static QPoly monomial(const Rational& c, int exponent);
    static QPoly q() { return monomial(Rational(1), 1); }
    /// Builds from (exponent, coefficient) pairs in any order; repeats are summed.
    static QPoly from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }
    Rational constant_term() const;
    Rational coeff(int exponent) const;
    /// Highest exponent; -1 for the zero polynomial.
    int degree() const { return terms_.empty() ? -1 : terms_.back().first; }
    int low_degree() const { return terms_.empty() ? -1 : terms_.front().first; }
    size_t term_count() const { return terms_.size(); }

    friend QPoly operator+(const QPoly& a, const QPoly& b);
    friend QPoly operator-(const QPoly& a, const QPoly& b);
    friend QPoly operator-(const QPoly& a);
    friend QPoly operator*(const QPoly& a, const QPoly& b);
    QPoly& operator+=(const QPoly& o) { return *this = *this + o; }
    QPoly& operator-=(const QPoly& o) { return *this = *this - o; }
    QPoly& operator*=(const QPoly& o) { return *this = *this * o; }
    friend bool operator==(const QPoly& a, const QPoly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const QPoly& a, const QPoly& b) { return !(a == b); }

    QPoly scaled(const Rational& c) const;
    /// p(q) -> p(q^k), k >= 1.
    QPoly subs_power(int k) const;
    /// Quotient and remainder by a nonzero divisor.
    std::pair<QPoly, QPoly> divmod(const QPoly& divisor) const;
    /// Quotient; throws InexactDivision on a nonzero remainder.
    QPoly exact_div(const QPoly& divisor) const;

    template <class R>
    R eval(const R& q) const;

    /// Canonical text, descending exponents: "-q^2 + q + 1".
    std::string to_string(const std::string& var = "q") const;
    static QPoly parse(const std::string& text);

private:
    std::vector<Term> terms_;
};

template <class R>
R QPoly::eval(const R& q) const {
    R acc = ring_traits<R>::zero();
    int k = degree();
    if (k < 0) return acc;
    size_t idx = terms_.size();
    // Horner over the dense exponent range.
    for (int e = k; e >= 0; --e) {
        acc = R(acc * q);
        if (idx > 0 && terms_[idx - 1].first == e) {
            acc = R(acc + R(terms_[idx - 1].second));
            --idx;
        }
    }
    return acc;
}

template <>
inline Complex QPoly::eval<Complex>(const Complex& q) const {
    Complex acc(0.0, 0.0);
    size_t idx = terms_.size();
    for (int e = degree(); e >= 0; --e) {
        acc *= q;
        if (idx > 0 && terms_[idx - 1].first == e) {
            acc += terms_[idx - 1].second.get_d();
            --idx;
        }
    }
    return acc;
}

template <>
struct ring_traits<QPoly> {
    static constexpr bool exact = true;
    static constexpr bool numeric = false;
    static const char* name() { return "symbolic"; }
    static QPoly zero() { return QPoly(); }
    static QPoly one() { return QPoly(1L); }
    static QPoly from_int(long v) { return QPoly(v); }
    static bool is_zero(const QPoly& a) { return a.is_zero(); }
    static bool is_unit(const QPoly& a) { return a.is_constant() && !a.is_zero(); }
    static QPoly inverse(const QPoly& a) {
        if (!is_unit(a)) throw NotAUnit("polynomial in q is not a nonzero constant: " + a.to_string());
        return QPoly(Rational(1 / a.constant_term()));
    }
    static long double magnitude(const QPoly& a) { return a.is_zero() ? 0.0L : 1.0L; }
    static std::string to_string(const QPoly& a) { return a.to_string(); }
};

}  // namespace qflow
