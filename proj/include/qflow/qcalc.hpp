#pragma once

// q-analogues: brackets, factorials, Gaussian binomials, Pochhammer symbols.

#include <cmath>
#include <utility>
#include <variant>
#include <vector>

#include "qflow/qpoly.hpp"
#include "qflow/qvalue.hpp"
#include "qflow/ring.hpp"

namespace qflow {

/// Any value produced by q-dependent evaluation.
using AnyScalar = std::variant<QPoly, Rational, Gaussian, Complex>;
std::string to_string(const AnyScalar& v);

/// [n]_q = 1 + q + ... + q^{n-1}; [0]_q = 0.
template <class R>
R q_bracket(int n, const R& q) {
    if (n < 0) throw DomainError("q_bracket needs n >= 0");
    R acc = ring_traits<R>::zero();
    R pw = ring_traits<R>::one();
    for (int k = 0; k < n; ++k) {
        acc = R(acc + pw);
        if (k + 1 < n) pw = R(pw * q);
    }
    return acc;
}

/// [0]_q, [1]_q, ..., [n]_q.
template <class R>
std::vector<R> q_bracket_table(int n, const R& q) {
    std::vector<R> out;
    out.reserve(static_cast<size_t>(n) + 1);
    out.push_back(ring_traits<R>::zero());
    R pw = ring_traits<R>::one();
    for (int k = 1; k <= n; ++k) {
        out.push_back(R(out.back() + pw));
        pw = R(pw * q);
    }
    return out;
}

/// q^0, q^1, ..., q^n.
template <class R>
std::vector<R> q_power_table(int n, const R& q) {
    std::vector<R> out;
    out.reserve(static_cast<size_t>(n) + 1);
    out.push_back(ring_traits<R>::one());
    for (int k = 1; k <= n; ++k) out.push_back(R(out.back() * q));
    return out;
}

/// [n]!_q = [1]_q ... [n]_q; [0]!_q = 1.
template <class R>
R q_factorial(int n, const R& q) {
    if (n < 0) throw DomainError("q_factorial needs n >= 0");
    R acc = ring_traits<R>::one();
    R br = ring_traits<R>::zero();
    R pw = ring_traits<R>::one();
    for (int k = 1; k <= n; ++k) {
        br = R(br + pw);
        pw = R(pw * q);
        acc = R(acc * br);
    }
    return acc;
}

/// Gaussian binomial as a polynomial in q, built by the q-Pascal recursion.
QPoly q_binomial(int n, int j);

/// Gaussian binomial evaluated at q (row of the Pascal triangle in R).
template <class R>
R q_binomial_at(int n, int j, const R& q) {
    if (j < 0 || j > n) throw DomainError("q_binomial needs 0 <= j <= n");
    // Row recursion C(i, k) = C(i-1, k-1) + q^k C(i-1, k).
    std::vector<R> row(static_cast<size_t>(j) + 1, ring_traits<R>::zero());
    row[0] = ring_traits<R>::one();
    std::vector<R> qp = q_power_table(j, q);
    for (int i = 1; i <= n; ++i) {
        for (int k = std::min(i, j); k >= 1; --k) row[static_cast<size_t>(k)] = R(row[static_cast<size_t>(k - 1)] + qp[static_cast<size_t>(k)] * row[static_cast<size_t>(k)]);
    }
    return row[static_cast<size_t>(j)];
}

/// (a;q)_n = prod_{j<n} (1 - a q^j).
template <class R>
R q_pochhammer(const R& a, const R& q, int n) {
    if (n < 0) throw DomainError("q_pochhammer needs n >= 0");
    R acc = ring_traits<R>::one();
    R aq = a;
    for (int j = 0; j < n; ++j) {
        acc = R(acc * R(ring_traits<R>::one() - aq));
        if (j + 1 < n) aq = R(aq * q);
    }
    return acc;
}

struct InfiniteProduct {
    ComplexLD value;
    int last_index;  ///< J: factors j = 0..J were multiplied
};

/// (a;q^{-1})_inf = prod_{j>=0} (1 - a q^{-j}), truncated at the least J with
/// |a||q|^{-J} < tol. Factors are multiplied in increasing j.
InfiniteProduct q_pochhammer_inf(ComplexLD a, ComplexLD q, long double tol);

// Real-valued helpers on |q| used by estimates and fits.
long double bracket_abs(int n, long double qabs);
long double log_bracket_abs(int n, long double qabs);
long double log_qfactorial_abs(int n, long double qabs);
long double log_factorial(int n);

// QValue-level entry points.
AnyScalar q_bracket(int n, const QValue& q);
AnyScalar q_factorial(int n, const QValue& q);

}  // namespace qflow
