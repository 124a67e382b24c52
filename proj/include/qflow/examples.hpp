#pragma once

// Registry of worked equations with closed-form coefficient tables. Each
// oracle is computed from its closed form alone, never through the solver.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qflow/qcalc.hpp"
#include "qflow/solver.hpp"

namespace qflow {

struct ExampleInfo {
    std::string id;
    std::string equation;     ///< the equation in plain text
    std::string closed_form;  ///< the oracle in plain text
    Operator op;
    int p;
    bool uses_alpha;          ///< alpha is a free parameter
    int default_nx;
    int default_ne;
    std::string default_q;    ///< QValue text
};

const std::vector<ExampleInfo>& example_registry();
/// Throws DomainError for unknown ids.
const ExampleInfo& find_example(const std::string& id);

struct ExampleParams {
    int nx = 10;
    int ne = 10;
    int alpha = 1;
    int p = 1;  ///< only for sigma-shift
};

namespace detail {

template <class R>
R rat(long num, long den = 1) {
    if constexpr (std::is_same_v<R, Complex>)
        return Complex(static_cast<double>(num) / static_cast<double>(den), 0.0);
    else {
        Rational v(num, den);
        v.canonicalize();
        return R(v);
    }
}

template <class R>
Series2<R> scalar_table(int nx, int ne) {
    return Series2<R>(nx, ne, 1, 1);
}

template <class R>
Series2<R> identity_matrix_data(int N) {
    Series2<R> A(0, 0, N, N);
    for (int i = 0; i < N; ++i) A.at(0, 0, i, i) = ring_traits<R>::one();
    return A;
}

/// Polynomials in x of the forcing of sigma-shift: f_0 = 1 + 2x, f_1 = x - x^2, f_2 = 3.
inline std::vector<std::vector<long>> sigma_shift_forcing() { return {{1, 2}, {0, 1, -1}, {3}}; }

}  // namespace detail

/// The equation of an example with q in the ring R. The forcing of the
/// examples with an infinite series is truncated at the degree that keeps
/// the requested window exact.
template <class R>
EquationSpec<R> example_spec(const std::string& id, const R& q, const ExampleParams& prm) {
    const ExampleInfo& info = find_example(id);
    EquationSpec<R> s;
    s.op = info.op;
    s.p = info.p;
    s.alpha = info.uses_alpha ? prm.alpha : 1;
    s.N = 1;
    s.q = q;
    s.F.A = detail::identity_matrix_data<R>(1);
    const R one = ring_traits<R>::one();
    const R mone = R(-one);
    if (id == "euler-q") {
        s.F.b = Series2<R>(1, 0);
        s.F.b.at(1, 0) = mone;
    } else if (id == "geom-q") {
        s.F.b = Series2<R>(0, 0);
        s.F.b.at(0, 0) = mone;
    } else if (id == "heine") {
        s.F.b = Series2<R>(0, 0);
        s.F.b.at(0, 0) = mone;
        s.F.A = Series2<R>(1, 0);
        s.F.A.at(0, 0) = one;
        s.F.A.at(1, 0) = mone;
    } else if (id == "dq-p0" || id == "dq-p1-geom" || id == "model-M") {
        s.F.b = Series2<R>(prm.nx, 0);
        for (int n = 0; n <= prm.nx; ++n) s.F.b.at(n, 0) = mone;
    } else if (id == "sigma-shift") {
        s.p = prm.p;
        const auto f = detail::sigma_shift_forcing();
        s.F.b = Series2<R>(2, 2);
        for (size_t m = 0; m < f.size(); ++m)
            for (size_t k = 0; k < f[m].size(); ++k) s.F.b.at(static_cast<int>(k), static_cast<int>(m)) = detail::rat<R>(-f[m][k]);
    } else if (id == "sigma-x2") {
        s.F.b = Series2<R>(1, 0);
        s.F.b.at(1, 0) = mone;
    } else if (id == "dq-p1-pm") {
        s.F.A = Series2<R>(1, 0);
        s.F.A.at(0, 0) = one;
        s.F.A.at(1, 0) = one;
        s.F.b = Series2<R>(1, 1);
        s.F.b.at(1, 1) = mone;
    } else if (id == "dq-pminus1") {
        const int L = prm.nx + prm.ne / std::max(1, s.alpha);
        s.F.b = Series2<R>(L, 0);
        for (int n = 0; n <= L; ++n) s.F.b.at(n, 0) = mone;
    }
    return s;
}

/// Expected coefficient table a[n][m], n <= nx, m <= ne, from the closed form.
template <class R>
Series2<R> example_oracle(const std::string& id, const R& q, const ExampleParams& prm) {
    const ExampleInfo& info = find_example(id);
    const int nx = prm.nx;
    const int ne = prm.ne;
    const int alpha = info.uses_alpha ? prm.alpha : 1;
    Series2<R> a(nx, ne);
    const R one = ring_traits<R>::one();
    if (id == "euler-q") {
        // a_{m+1,m} = [m]!_q
        R fact = one;
        for (int m = 0; m <= ne; ++m) {
            if (m > 0) fact = R(fact * q_bracket(m, q));
            if (m + 1 <= nx) a.at(m + 1, m) = fact;
        }
    } else if (id == "geom-q") {
        // a_{n,n} = q^{n(n-1)/2}
        for (int n = 0; n <= std::min(nx, ne); ++n) a.at(n, n) = ring_pow(q, static_cast<long>(n) * (n - 1) / 2);
    } else if (id == "heine") {
        // a_{n, alpha m} = Gaussian binomial (n+m choose m) at q
        for (int n = 0; n <= nx; ++n)
            for (int m = 0; alpha * m <= ne; ++m) a.at(n, alpha * m) = q_binomial_at(n + m, m, q);
    } else if (id == "dq-p0") {
        // a_{n, alpha m} = [n]_q^m with 0^0 = 1
        for (int n = 0; n <= nx; ++n) {
            const R br = q_bracket(n, q);
            for (int m = 0; alpha * m <= ne; ++m) a.at(n, alpha * m) = ring_pow(br, m);
        }
    } else if (id == "sigma-shift") {
        // u_n(x) = sum_j q^{p j(j-1)/2} x^{j p} f_{n-j}(q^j x)
        const auto f = detail::sigma_shift_forcing();
        const int p = prm.p;
        for (int n = 0; n <= ne; ++n)
            for (int j = 0; j <= n; ++j) {
                const int fi = n - j;
                if (fi >= static_cast<int>(f.size())) continue;
                const R pre = ring_pow(q, static_cast<long>(p) * j * (j - 1) / 2);
                for (size_t k = 0; k < f[static_cast<size_t>(fi)].size(); ++k) {
                    const int deg = j * p + static_cast<int>(k);
                    if (deg > nx || f[static_cast<size_t>(fi)][k] == 0) continue;
                    const R term = R(R(pre * ring_pow(q, static_cast<long>(j) * static_cast<long>(k))) *
                                     detail::rat<R>(f[static_cast<size_t>(fi)][k]));
                    a.at(deg, n) = R(a.at(deg, n) + term);
                }
            }
    } else if (id == "sigma-x2") {
        // a_{2n+1,n} = q^{n^2}
        for (int n = 0; 2 * n + 1 <= nx && n <= ne; ++n) a.at(2 * n + 1, n) = ring_pow(q, static_cast<long>(n) * n);
    } else if (id == "dq-p1-geom") {
        // a_{k,m} = prod_{i<m} [k-m+i]_q, the coefficient of (x^2 d_q)^m x^{k-m}
        for (int k = 0; k <= nx; ++k)
            for (int m = 0; m <= std::min(k, ne); ++m) {
                R v = one;
                for (int i = 0; i < m; ++i) v = R(v * q_bracket(k - m + i, q));
                a.at(k, m) = v;
            }
    } else if (id == "dq-p1-pm") {
        // y_n(eps) = eps prod_{j=1}^{n-1} ([j]_q eps - 1)
        for (int n = 1; n <= nx; ++n) {
            std::vector<R> poly{ring_traits<R>::zero(), one};
            for (int j = 1; j <= n - 1; ++j) {
                const R br = q_bracket(j, q);
                std::vector<R> next(poly.size() + 1, ring_traits<R>::zero());
                for (size_t i = 0; i < poly.size(); ++i) {
                    next[i] = R(next[i] - poly[i]);
                    next[i + 1] = R(next[i + 1] + br * poly[i]);
                }
                poly.swap(next);
            }
            for (size_t m = 0; m < poly.size() && static_cast<int>(m) <= ne; ++m) a.at(n, static_cast<int>(m)) = poly[m];
        }
    } else if (id == "dq-pminus1") {
        // a_{n, alpha m} = [n+m]!_q / [n]!_q = [n+1]_q ... [n+m]_q
        for (int n = 0; n <= nx; ++n)
            for (int m = 0; alpha * m <= ne; ++m) {
                R v = one;
                for (int k = n + 1; k <= n + m; ++k) v = R(v * q_bracket(k, q));
                a.at(n, alpha * m) = v;
            }
    } else if (id == "model-M") {
        // a_{n,m} = q^{nm}
        for (int n = 0; n <= nx; ++n)
            for (int m = 0; m <= ne; ++m) a.at(n, m) = ring_pow(q, static_cast<long>(n) * m);
    }
    return a;
}

// ---------------------------------------------------------------- P_m ladder

/// Polynomial in x with coefficients in Q[q]; c[k] is the x^k coefficient.
struct XQPoly {
    std::vector<QPoly> c;

    int x_degree() const;
    int q_degree() const;
    size_t term_count() const;
    /// Leading x-coefficient's leading q term as "x^a q^b" exponents.
    std::pair<int, int> leading_exponents() const;
    std::string to_string() const;
    friend bool operator==(const XQPoly& a, const XQPoly& b);
};

/// P_1, ..., P_{m_max} of the numerator ladder
///   P_{m+1} = q^m (1+x)^m x d_q P_m + ((q^m (1+x)^m - (-qx;q)_m)/(q-1)) P_m,
/// with exact division by q - 1. Index 0 of the result is P_1.
std::vector<XQPoly> pm_ladder(int m_max);

/// prod_{j=0}^{m-1} (1 + q^j x)^{m-j}.
XQPoly pm_denominator(int m);

XQPoly xq_mul(const XQPoly& a, const XQPoly& b);

/// The published P_2, ..., P_5 transcribed term by term; throws DomainError
/// for other m.
XQPoly pm_printed(int m);

struct PmLadderRow {
    int m = 0;
    int x_degree = 0;
    int q_degree = 0;
    size_t terms = 0;
    std::pair<int, int> leading{-1, -1};
    bool degrees_ok = true;  ///< deg_x = m(m-1)/2 - 1, deg_q = (m-1)(m-2)(m+3)/6 (m >= 2)
    int printed = -1;        ///< -1: no printed form, 0: mismatch, 1: match
    int solver = -1;         ///< same for the eps-major cross-check
};

struct PmLadderCheck {
    std::vector<XQPoly> ladder;  ///< P_1..P_{m_max}
    std::vector<PmLadderRow> rows;
    bool ok = true;
};

/// Ladder up to m_max with degree checks, the printed forms, and
/// u_m prod_{j<m} (1 + q^j x)^{m-j} = x^m P_m on the first nx x-orders of
/// the symbolic eps-major solution for m <= solver_m.
PmLadderCheck check_pm_ladder(int m_max, int solver_m, int nx);

// ------------------------------------------------------------ random specs

struct RandomSpecPlan {
    int max_dim = 2;
    std::vector<int> p_values{0, 1, 2};  ///< p = -1 forces d_q
    std::vector<int> alpha_values{1};
    int data_degree = 2;
    Rational q = Rational(3, 2);
};

/// Random exact problem with one quadratic nonlinear term and F(0,0,0) = 0.
EquationSpec<Rational> random_spec(std::mt19937_64& rng, const RandomSpecPlan& plan);

}  // namespace qflow
