#pragma once

// Formal solutions of
//     eps^alpha x^{p+1} d_q y = F(x, eps, y)    (operator DQ, p >= -1)
//     eps^alpha x^p sigma_q y = F(x, eps, y)    (operator SIGMAQ, p >= 0)
// with F = b + A y + sum_I A_I y^I given as polynomial data.
//
// Pipeline: validate, reduce alpha to 1 (dimension N*alpha), solve the
// initial slice by formal Newton, recenter, run the row recurrence in the
// chosen major variable, undo the recentering, fold the reduction back.

#include <chrono>
#include <functional>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/qcalc.hpp"
#include "qflow/series.hpp"

namespace qflow {

enum class Operator { DQ, SIGMAQ };

inline const char* operator_name(Operator op) { return op == Operator::DQ ? "dq" : "sigmaq"; }

template <class R>
struct EquationSpec {
    Operator op = Operator::DQ;
    int p = 1;
    int alpha = 1;
    int N = 1;
    R q = ring_traits<R>::one();
    FData<R> F;
    /// Off only for limit computations at |q| = 1.
    bool require_q_modulus = true;
};

struct SpecIssue {
    std::string hypothesis;
    std::string message;
};

class SpecError : public Error {
public:
    explicit SpecError(std::vector<SpecIssue> issues);
    const std::vector<SpecIssue>& issues() const { return issues_; }

private:
    std::vector<SpecIssue> issues_;
};

struct SolveDiagnostics {
    std::string path;  ///< "x-major" or "e-major"
    int nx = 0;
    int ne = 0;
    int reduced_dim = 0;
    int working_x_order = 0;
    int working_e_order = 0;
    int newton_iterations = 0;
    double seconds = 0;
};

template <class R>
struct SolveResult {
    Series2<R> table;  ///< a[n][m], N x 1 blocks
    Series1<R> y0;     ///< row n = 0 as a series in eps
    Series1<R> u0;     ///< column m = 0 as a series in x
    SolveDiagnostics diagnostics;
};

struct CrossCheck {
    bool agree = true;
    double max_discrepancy = 0;  ///< 0 for exact agreement
    int first_n = -1;
    int first_m = -1;
    int first_component = -1;
};

// ------------------------------------------------------------ utilities

namespace detail {

template <class R>
bool negligible(const R& v, long double tol) {
    if constexpr (ring_traits<R>::exact) {
        (void)tol;
        return ring_traits<R>::is_zero(v);
    } else {
        return ring_traits<R>::magnitude(v) <= tol;
    }
}

template <class R>
int valuation_tol(const Series1<R>& s, long double tol) {
    for (int k = 0; k <= s.order(); ++k)
        for (int e = 0; e < s.block_size(); ++e)
            if (!negligible(s.block(k)[e], tol)) return k;
    return s.order() + 1;
}

template <class R>
long double max_magnitude(const Series2<R>& s) {
    long double m = 0;
    if constexpr (ring_traits<R>::numeric)
        for (const auto& v : s.data()) m = std::max(m, ring_traits<R>::magnitude(v));
    return m;
}

template <class R>
bool modulus_exceeds_one(const R& q) {
    if constexpr (std::is_same_v<R, Rational>) {
        return abs(q) > 1;
    } else if constexpr (std::is_same_v<R, Gaussian>) {
        return q.norm_sq() > 1;
    } else if constexpr (std::is_same_v<R, Complex>) {
        return std::abs(q) > 1.0;
    } else {
        (void)q;
        return true;  // symbolic q: the hypothesis is assumed
    }
}

/// c(k) of the recurrences: [k]_q for DQ, q^k for SIGMAQ.
template <class R>
std::vector<R> shift_factors(Operator op, int n, const R& q) {
    return op == Operator::DQ ? q_bracket_table(n, q) : q_power_table(n, q);
}

/// Binomial coefficient as a ring element.
template <class R>
R binom_ring(int n, int k) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    if constexpr (std::is_same_v<R, Complex>) {
        return Complex(c.get_d(), 0.0);
    } else {
        return R(Rational(c));
    }
}

/// Multi-indices J <= I componentwise.
inline std::vector<MultiIndex> sub_indices(const MultiIndex& I) {
    std::vector<MultiIndex> out{MultiIndex(I.size(), 0)};
    for (size_t l = 0; l < I.size(); ++l) {
        std::vector<MultiIndex> next;
        for (const auto& J : out)
            for (int v = 0; v <= I[l]; ++v) {
                MultiIndex K = J;
                K[l] = v;
                next.push_back(K);
            }
        out.swap(next);
    }
    return out;
}

/// Closure of a set of multi-indices under "remove one from the last nonzero
/// entry", together with the unit indices they use, sorted by total degree then lexicographically. Degree-0 excluded.
inline std::vector<MultiIndex> power_closure(const std::vector<MultiIndex>& seeds) {
    std::set<MultiIndex> all;
    for (MultiIndex I : seeds) {
        while (degree(I) >= 1) {
            if (!all.insert(I).second) break;
            for (size_t l = 0; l < I.size(); ++l)
                if (I[l] > 0) {
                    MultiIndex e(I.size(), 0);
                    e[l] = 1;
                    all.insert(e);
                }
            for (int l = static_cast<int>(I.size()) - 1; l >= 0; --l)
                if (I[static_cast<size_t>(l)] > 0) {
                    --I[static_cast<size_t>(l)];
                    break;
                }
        }
    }
    std::vector<MultiIndex> out(all.begin(), all.end());
    std::stable_sort(out.begin(), out.end(),
                     [](const MultiIndex& a, const MultiIndex& b) { return degree(a) < degree(b); });
    return out;
}

inline int last_nonzero(const MultiIndex& I) {
    for (int l = static_cast<int>(I.size()) - 1; l >= 0; --l)
        if (I[static_cast<size_t>(l)] > 0) return l;
    return -1;
}

}  // namespace detail

// ---------------------------------------------------------- validation

template <class R>
std::vector<SpecIssue> validate_spec(const EquationSpec<R>& s) {
    std::vector<SpecIssue> issues;
    auto add = [&](const char* hyp, const std::string& msg) { issues.push_back({hyp, msg}); };
    if (s.p < -1) add("p >= -1", "p must be at least -1");
    if (s.p == -1 && s.op != Operator::DQ) add("p=-1 case", "p=-1 requires d_q operator");
    if (s.alpha < 1) add("alpha >= 1", "alpha must be a positive integer");
    if (s.N < 1) add("dimension", "N must be positive");
    const auto& F = s.F;
    bool shapes_ok = true;
    if (F.b.rows() != s.N || F.b.cols() != 1) {
        add("dimension", "b must have N x 1 entries");
        shapes_ok = false;
    }
    if (F.A.rows() != s.N || F.A.cols() != s.N) {
        add("dimension", "A must have N x N entries");
        shapes_ok = false;
    }
    for (const auto& t : F.nonlinear) {
        if (static_cast<int>(t.I.size()) != s.N) {
            add("dimension", "multi-index length differs from N");
            shapes_ok = false;
        } else if (degree(t.I) < 2) {
            add("nonlinear part", "nonlinear multi-indices need |I| >= 2");
        }
        for (int v : t.I)
            if (v < 0) add("nonlinear part", "negative entry in a multi-index");
        if (t.coeff.rows() != s.N || t.coeff.cols() != 1) {
            add("dimension", "nonlinear coefficients must have N x 1 entries");
            shapes_ok = false;
        }
    }
    if (s.require_q_modulus && !detail::modulus_exceeds_one(s.q)) add("|q| > 1", "|q| > 1 required");
    if (shapes_ok && s.N >= 1) {
        Matrix<R> a00(s.N);
        std::copy(F.A.block(0, 0), F.A.block(0, 0) + s.N * s.N, a00.a.begin());
        try {
            (void)invert(a00);
        } catch (const NotAUnit&) {
            add("DF_y(0,0,0) invertible", "DF_y(0,0,0) not invertible");
        }
        if (!F.nonlinear.empty() && !F.b.block_zero(0, 0))
            add("F(0,0,0) = 0", "F(0,0,0) must vanish when F has nonlinear terms");
    }
    return issues;
}

template <class R>
void require_valid(const EquationSpec<R>& s) {
    auto issues = validate_spec(s);
    if (!issues.empty()) throw SpecError(std::move(issues));
}

// ------------------------------------------------------- rank reduction

/// Rewrites the problem with y = sum_{j<alpha} y_j(x, eps^alpha) eps^j as a
/// system of dimension N*alpha in eta = eps^alpha. Component j*N + c of w
/// is component c of y_j.
template <class R>
EquationSpec<R> rank_reduce(const EquationSpec<R>& s) {
    const int a = s.alpha;
    if (a == 1) return s;
    const int N = s.N;
    const int NA = N * a;
    const auto& F = s.F;
    EquationSpec<R> out = s;
    out.alpha = 1;
    out.N = NA;
    auto eta_order = [a](int ne_data, int extra) { return (ne_data + extra) / a; };

    // b: component l*N + c at eta^t is b_c at eps^{a t + l}.
    Series2<R> b(F.b.nx(), eta_order(F.b.ne(), 0), NA, 1);
    for (int n = 0; n <= F.b.nx(); ++n)
        for (int m = 0; m <= F.b.ne(); ++m)
            for (int c = 0; c < N; ++c) b.at(n, m / a, (m % a) * N + c) = F.b.at(n, m, c);
    out.F.b = b;

    // A: block (l, k) at eta^t is A at eps^{a t + l - k}.
    Series2<R> A(F.A.nx(), eta_order(F.A.ne(), a - 1), NA, NA);
    for (int n = 0; n <= F.A.nx(); ++n)
        for (int m = 0; m <= F.A.ne(); ++m)
            for (int k = 0; k < a; ++k) {
                const int s_tot = m + k;
                const int l = s_tot % a;
                const int t = s_tot / a;
                for (int i = 0; i < N; ++i)
                    for (int j = 0; j < N; ++j) A.at(n, t, l * N + i, k * N + j) = F.A.at(n, m, i, j);
            }
    out.F.A = A;

    // Nonlinear terms: distribute each exponent i_c over the alpha blocks.
    std::map<MultiIndex, Series2<R>> acc;
    for (const auto& term : F.nonlinear) {
        const int deg = degree(term.I);
        const int ne_out = eta_order(term.coeff.ne(), deg * (a - 1));
        // Enumerate per-component compositions.
        std::vector<std::vector<std::vector<int>>> parts(static_cast<size_t>(N));
        for (int c = 0; c < N; ++c) {
            std::vector<int> cur(static_cast<size_t>(a), 0);
            std::function<void(int, int)> rec = [&](int pos, int left) {
                if (pos == a - 1) {
                    cur[static_cast<size_t>(pos)] = left;
                    parts[static_cast<size_t>(c)].push_back(cur);
                    return;
                }
                for (int v = left; v >= 0; --v) {
                    cur[static_cast<size_t>(pos)] = v;
                    rec(pos + 1, left - v);
                }
            };
            rec(0, term.I[static_cast<size_t>(c)]);
        }
        std::vector<size_t> choice(static_cast<size_t>(N), 0);
        while (true) {
            MultiIndex J(static_cast<size_t>(NA), 0);
            int e = 0;
            mpz_class mult = 1;
            for (int c = 0; c < N; ++c) {
                const auto& part = parts[static_cast<size_t>(c)][choice[static_cast<size_t>(c)]];
                // multinomial(i_c; part)
                int left = term.I[static_cast<size_t>(c)];
                for (int k = 0; k < a; ++k) {
                    const int v = part[static_cast<size_t>(k)];
                    J[static_cast<size_t>(k * N + c)] = v;
                    e += k * v;
                    mpz_class bc;
                    mpz_bin_uiui(bc.get_mpz_t(), static_cast<unsigned long>(left), static_cast<unsigned long>(v));
                    mult *= bc;
                    left -= v;
                }
            }
            R coef;
            if constexpr (std::is_same_v<R, Complex>)
                coef = Complex(mult.get_d(), 0.0);
            else
                coef = R(Rational(mult));
            auto it = acc.find(J);
            if (it == acc.end()) it = acc.emplace(J, Series2<R>(term.coeff.nx(), ne_out, NA, 1)).first;
            Series2<R>& target = it->second;
            if (target.ne() < ne_out) target = resize(target, target.nx(), ne_out);
            if (target.nx() < term.coeff.nx()) target = resize(target, term.coeff.nx(), target.ne());
            for (int n = 0; n <= term.coeff.nx(); ++n)
                for (int m = 0; m <= term.coeff.ne(); ++m) {
                    const int s_tot = m + e;
                    const int l = s_tot % a;
                    const int t = s_tot / a;
                    for (int c = 0; c < N; ++c) {
                        const R& v = term.coeff.at(n, m, c);
                        if (ring_traits<R>::is_zero(v)) continue;
                        target.at(n, t, l * N + c) += R(coef * v);
                    }
                }
            size_t c = 0;
            while (c < static_cast<size_t>(N)) {
                if (++choice[c] < parts[c].size()) break;
                choice[c] = 0;
                ++c;
            }
            if (c == static_cast<size_t>(N)) break;
        }
    }
    out.F.nonlinear.clear();
    for (auto& [J, coeff] : acc) out.F.nonlinear.push_back({J, std::move(coeff)});
    return out;
}

/// Folds a reduced table (dimension N*alpha, eta orders) back to eps:
/// a[n][alpha k + j][c] = w[n][k][j N + c].
template <class R>
Series2<R> fold_back(const Series2<R>& w, int alpha, int N, int ne) {
    Series2<R> a(w.nx(), ne, N, 1);
    for (int n = 0; n <= w.nx(); ++n)
        for (int m = 0; m <= ne; ++m) {
            const int k = m / alpha;
            const int j = m % alpha;
            if (k > w.ne()) continue;
            for (int c = 0; c < N; ++c) a.at(n, m, c) = w.at(n, k, j * N + c);
        }
    return a;
}

// ------------------------------------------------------ initial slice

/// F restricted to a coordinate line, as univariate series.
template <class R>
struct SliceData {
    Series1<R> b;  ///< N x 1
    Series1<R> A;  ///< N x N
    std::vector<std::pair<MultiIndex, Series1<R>>> nonlinear;
};

template <class R>
SliceData<R> x_slice(const FData<R>& F, int n, int order) {
    SliceData<R> d{crop(slice_x_major(resize(F.b, std::max(F.b.nx(), n), order), n), order),
                   crop(slice_x_major(resize(F.A, std::max(F.A.nx(), n), order), n), order), {}};
    for (const auto& t : F.nonlinear)
        d.nonlinear.emplace_back(t.I, slice_x_major(resize(t.coeff, std::max(t.coeff.nx(), n), order), n));
    return d;
}

template <class R>
SliceData<R> e_slice(const FData<R>& F, int m, int order) {
    SliceData<R> d{slice_e_major(resize(F.b, order, std::max(F.b.ne(), m)), m),
                   slice_e_major(resize(F.A, order, std::max(F.A.ne(), m)), m), {}};
    for (const auto& t : F.nonlinear)
        d.nonlinear.emplace_back(t.I, slice_e_major(resize(t.coeff, order, std::max(t.coeff.ne(), m)), m));
    return d;
}

namespace detail {

template <class R>
Series1<R> series_power(std::map<MultiIndex, Series1<R>>& cache, const std::vector<Series1<R>>& comps,
                        const MultiIndex& I) {
    auto it = cache.find(I);
    if (it != cache.end()) return it->second;
    const int l = last_nonzero(I);
    Series1<R> v;
    if (l < 0) {
        v = Series1<R>(comps.at(0).order());
        v.at(0) = ring_traits<R>::one();
    } else {
        MultiIndex J = I;
        --J[static_cast<size_t>(l)];
        v = mul(series_power(cache, comps, J), comps[static_cast<size_t>(l)]);
    }
    cache.emplace(I, v);
    return v;
}

}  // namespace detail

/// Solves G(t, y) = b + A y + sum_I A_I y^I - [subtract_shift] t y = 0 for a
/// series y(t) by formal Newton with the full Jacobian. Each step at least
/// doubles the valuation of the residual.
template <class R>
Series1<R> newton_slice(const SliceData<R>& d, bool subtract_shift, int* iterations = nullptr) {
    const int N = d.b.rows();
    const int K = d.b.order();
    long double tol = 0;
    if constexpr (!ring_traits<R>::exact) {
        long double scale = 1;
        for (const auto& v : d.b.data()) scale = std::max(scale, ring_traits<R>::magnitude(v));
        for (const auto& v : d.A.data()) scale = std::max(scale, ring_traits<R>::magnitude(v));
        tol = 1e-12L * scale;
    }
    Series1<R> y(K, N, 1);
    auto residual = [&](const Series1<R>& yy, std::map<MultiIndex, Series1<R>>& cache,
                        const std::vector<Series1<R>>& comps) {
        Series1<R> g = add(crop(d.b, K), mul(crop(d.A, K), yy));
        for (const auto& [I, c] : d.nonlinear) g = add(g, mul(crop(c, K), detail::series_power(cache, comps, I)));
        if (subtract_shift) g = sub(g, shift(yy, 1));
        return g;
    };
    int iters = 0;
    int prev_val = -1;
    while (true) {
        std::vector<Series1<R>> comps;
        for (int l = 0; l < N; ++l) comps.push_back(y.entry(l));
        std::map<MultiIndex, Series1<R>> cache;
        Series1<R> g = residual(y, cache, comps);
        const int val = detail::valuation_tol(g, tol);
        if (val > K) break;
        if (val <= prev_val) throw SolverStalled("residual valuation stayed at " + std::to_string(val));
        if (iters > 64) throw SolverStalled("no convergence after 64 steps");
        prev_val = val;
        // Jacobian.
        Series1<R> J = crop(d.A, K);
        for (const auto& [I, c] : d.nonlinear)
            for (int l = 0; l < N; ++l) {
                const int il = I[static_cast<size_t>(l)];
                if (il == 0) continue;
                MultiIndex Il = I;
                --Il[static_cast<size_t>(l)];
                Series1<R> col = scale(mul(crop(c, K), detail::series_power(cache, comps, Il)), R(ring_traits<R>::from_int(il)));
                for (int k = 0; k <= K; ++k)
                    for (int i = 0; i < N; ++i) J.at(k, i, l) = R(J.at(k, i, l) + col.at(k, i));
            }
        if (subtract_shift)
            for (int k = 1; k <= K; ++k)
                for (int i = 0; i < N; ++i) J.at(k, i, i) = R(J.at(k, i, i) - ring_traits<R>::one());
        Matrix<R> j0inv = invert(J.block_matrix(0));
        y = sub(y, solve_linear(J, j0inv, g));
        ++iters;
    }
    if (iterations) *iterations = iters;
    return y;
}

// ---------------------------------------------------------- recentering

/// Re-expands F at y = y0 + z: returns data G with G(z) = F(y0 + z). y0 is
/// given by N scalar tables; orders of the result are those of F.
template <class R>
FData<R> reexpand(const FData<R>& F, const std::vector<Series2<R>>& y0) {
    const int N = F.dim();
    bool zero = true;
    for (const auto& c : y0) zero = zero && c.is_zero();
    if (zero) return F;
    const int nx = F.b.nx();
    const int ne = F.b.ne();
    std::vector<Series2<R>> y;
    for (const auto& c : y0) y.push_back(resize(c, nx, ne));
    Series2<R> yv(nx, ne, N, 1);
    for (int l = 0; l < N; ++l)
        for (int n = 0; n <= nx; ++n)
            for (int m = 0; m <= ne; ++m) yv.at(n, m, l) = y[static_cast<size_t>(l)].at(n, m);
    PowerCache<R> cache(y);
    FData<R> G;
    G.b = add(F.b, mul(resize(F.A, nx, ne), yv));
    G.A = resize(F.A, nx, ne);
    std::map<MultiIndex, Series2<R>> nl;
    for (const auto& term : F.nonlinear) {
        Series2<R> c = resize(term.coeff, nx, ne);
        for (const auto& J : detail::sub_indices(term.I)) {
            MultiIndex rest(term.I.size());
            R mult = ring_traits<R>::one();
            for (size_t l = 0; l < term.I.size(); ++l) {
                rest[l] = term.I[l] - J[l];
                mult = R(mult * detail::binom_ring<R>(term.I[l], J[l]));
            }
            Series2<R> contrib = scale(mul(c, cache.power(rest)), mult);
            const int dj = degree(J);
            if (dj == 0) {
                G.b = add(G.b, contrib);
            } else if (dj == 1) {
                const int l = detail::last_nonzero(J);
                for (int n = 0; n <= nx; ++n)
                    for (int m = 0; m <= ne; ++m)
                        for (int i = 0; i < N; ++i) G.A.at(n, m, i, l) = R(G.A.at(n, m, i, l) + contrib.at(n, m, i));
            } else {
                auto it = nl.find(J);
                if (it == nl.end())
                    nl.emplace(J, contrib);
                else
                    it->second = add(it->second, contrib);
            }
        }
    }
    for (auto& [J, c] : nl) G.nonlinear.push_back({J, std::move(c)});
    return G;
}

// -------------------------------------------------------- preparation

/// Reduced, recentered problem with its solved rows in the major variable.
template <class R>
struct Prepared {
    EquationSpec<R> reduced;   ///< alpha = 1, F recentered and padded to the working window
    Series1<R> initial;        ///< y0(eta) or u0(x) of the reduced system
    std::vector<Series1<R>> rows;  ///< rows[0] = 0; rows[n] for n >= 1, recentered
    bool x_major = true;
    int nx = 0;       ///< requested x order
    int ne = 0;       ///< requested eps order
    int eta_order = 0;
    int working_x = 0;
    int newton_iterations = 0;
    int alpha = 1;
    int N = 1;
};

namespace detail {

template <class R>
FData<R> pad_data(const FData<R>& F, int nx, int ne) {
    FData<R> G{resize(F.b, nx, ne), resize(F.A, nx, ne), {}};
    for (const auto& t : F.nonlinear) G.nonlinear.push_back({t.I, resize(t.coeff, nx, ne)});
    return G;
}

/// Runs the nonlinear part of the row recurrence. Holds rows of y^J for every
/// J in the closure of the nonlinear multi-indices.
template <class R>
class RowPowers {
public:
    RowPowers(const std::vector<MultiIndex>& seeds, int N, int max_row) : N_(N) {
        order_ = power_closure(seeds);
        for (size_t i = 0; i < order_.size(); ++i) index_[order_[i]] = i;
        rows_.assign(order_.size(), std::vector<Series1<R>>(static_cast<size_t>(max_row) + 1));
        (void)N_;
    }

    /// Fills row n of every power of degree >= 2 (needs rows < n of y).
    void advance(int n, int minor_order) {
        for (size_t i = 0; i < order_.size(); ++i) {
            const MultiIndex& J = order_[i];
            const int d = degree(J);
            if (d < 2) continue;
            const int l = last_nonzero(J);
            MultiIndex Jm = J;
            --Jm[static_cast<size_t>(l)];
            const auto& lower = rows_[index_.at(Jm)];
            const auto& yl = rows_[index_.at(unit(l, J.size()))];
            Series1<R> acc(minor_order);
            bool any = false;
            for (int k = d - 1; k <= n - 1; ++k) {
                const auto& a = lower[static_cast<size_t>(k)];
                const auto& b = yl[static_cast<size_t>(n - k)];
                if (a.order() == 0 && a.is_zero()) continue;
                if (b.is_zero() || a.is_zero()) continue;
                Series1<R> prod = mul(a, b);
                acc = any ? add(acc, prod) : crop(prod, std::min(minor_order, prod.order()));
                any = true;
            }
            rows_[i][static_cast<size_t>(n)] = any ? acc : Series1<R>(minor_order);
        }
    }

    /// Stores y_n once solved.
    void set_solution_row(int n, const Series1<R>& yn) {
        for (int l = 0; l < yn.rows(); ++l) {
            auto it = index_.find(unit(l, static_cast<size_t>(yn.rows())));
            if (it != index_.end()) rows_[it->second][static_cast<size_t>(n)] = yn.entry(l);
        }
    }

    const Series1<R>& row(const MultiIndex& J, int n) const { return rows_[index_.at(J)][static_cast<size_t>(n)]; }
    bool has(const MultiIndex& J) const { return index_.count(J) > 0; }

private:
    static MultiIndex unit(int l, size_t n) {
        MultiIndex e(n, 0);
        e[static_cast<size_t>(l)] = 1;
        return e;
    }
    int N_;
    std::vector<MultiIndex> order_;
    std::map<MultiIndex, size_t> index_;
    std::vector<std::vector<Series1<R>>> rows_;
};

template <class R>
std::vector<Series1<R>> extract_rows(const Series2<R>& f, bool x_major, int count) {
    std::vector<Series1<R>> rows;
    rows.reserve(static_cast<size_t>(count) + 1);
    for (int k = 0; k <= count; ++k) rows.push_back(x_major ? slice_x_major(f, k) : slice_e_major(f, k));
    return rows;
}

/// R_n = b_n + sum_{j=1}^{n-1} A_{n-j} y_j + sum_I sum_k A_{I,n-k} (y^I)_k.
template <class R>
Series1<R> row_remainder(int n, const std::vector<Series1<R>>& brows, const std::vector<Series1<R>>& arows,
                         const std::vector<std::pair<MultiIndex, std::vector<Series1<R>>>>& nlrows,
                         const std::vector<Series1<R>>& y, const RowPowers<R>& powers) {
    Series1<R> acc = brows[static_cast<size_t>(n)];
    for (int j = 1; j <= n - 1; ++j) {
        const auto& a = arows[static_cast<size_t>(n - j)];
        if (a.is_zero() || y[static_cast<size_t>(j)].is_zero()) continue;
        acc = add(acc, mul(a, y[static_cast<size_t>(j)]));
    }
    for (const auto& [I, crow] : nlrows) {
        for (int k = degree(I); k <= n; ++k) {
            const auto& c = crow[static_cast<size_t>(n - k)];
            const auto& pk = powers.row(I, k);
            if (c.is_zero() || pk.is_zero()) continue;
            acc = add(acc, mul(c, pk));
        }
    }
    return acc;
}

}  // namespace detail

/// x-major preparation: rows are y_n(eta), n = 0..Nx.
template <class R>
Prepared<R> prepare_x_major(const EquationSpec<R>& spec, int Nx, int Ne) {
    require_valid(spec);
    if (Nx < 1 || Ne < 0) throw DomainError("x-major solve needs Nx >= 1 and Ne >= 0");
    if (spec.p < 0) throw DomainError("x-major recurrence is not available for p = -1");
    Prepared<R> P;
    P.x_major = true;
    P.nx = Nx;
    P.ne = Ne;
    P.alpha = spec.alpha;
    P.N = spec.N;
    EquationSpec<R> red = rank_reduce(spec);
    const int K = Ne / spec.alpha;
    P.eta_order = K;
    P.working_x = Nx;
    red.F = detail::pad_data(red.F, Nx, K);
    const int N = red.N;
    const bool sig0 = red.op == Operator::SIGMAQ && red.p == 0;

    // Initial slice y0(eta) at x^0.
    P.initial = newton_slice(x_slice(red.F, 0, K), sig0, &P.newton_iterations);
    std::vector<Series2<R>> y0;
    for (int l = 0; l < N; ++l) {
        Series2<R> c(Nx, K);
        for (int m = 0; m <= K; ++m) c.at(0, m) = P.initial.at(m, l);
        y0.push_back(c);
    }
    red.F = reexpand(red.F, y0);
    if (red.op == Operator::SIGMAQ && red.p <= Nx) {
        // eta x^p sigma_q y0(eta) moves to the right-hand side.
        for (int m = 0; m + 1 <= K; ++m)
            for (int l = 0; l < N; ++l)
                red.F.b.at(red.p, m + 1, l) = R(red.F.b.at(red.p, m + 1, l) - P.initial.at(m, l));
    }
    P.reduced = red;

    auto brows = detail::extract_rows(red.F.b, true, Nx);
    auto arows = detail::extract_rows(red.F.A, true, Nx);
    std::vector<std::pair<MultiIndex, std::vector<Series1<R>>>> nlrows;
    std::vector<MultiIndex> seeds;
    for (const auto& t : red.F.nonlinear) {
        nlrows.emplace_back(t.I, detail::extract_rows(t.coeff, true, Nx));
        seeds.push_back(t.I);
    }
    detail::RowPowers<R> powers(seeds, N, Nx);
    std::vector<R> c = detail::shift_factors(red.op, Nx, red.q);
    const Series1<R>& A0 = arows[0];
    Matrix<R> a0inv = invert(A0.block_matrix(0));
    Matrix<R> neg_a0inv(N);
    for (size_t e = 0; e < a0inv.a.size(); ++e) neg_a0inv.a[e] = R(-a0inv.a[e]);

    std::vector<Series1<R>> y(static_cast<size_t>(Nx) + 1, Series1<R>(K, N, 1));
    powers.set_solution_row(0, y[0]);
    for (int n = 1; n <= Nx; ++n) {
        powers.advance(n, K);
        Series1<R> rem = detail::row_remainder(n, brows, arows, nlrows, y, powers);
        if (red.p > 0) {
            Series1<R> rhs = neg(rem);
            if (n - red.p >= 1)
                rhs = add(rhs, shift(scale(y[static_cast<size_t>(n - red.p)], c[static_cast<size_t>(n - red.p)]), 1));
            y[static_cast<size_t>(n)] = solve_linear(A0, a0inv, rhs);
        } else {
            // (eta c(n) I - A0(eta)) y_n = R_n
            Series1<R> M = neg(A0);
            for (int i = 0; i < N; ++i)
                if (K >= 1) M.at(1, i, i) = R(M.at(1, i, i) + c[static_cast<size_t>(n)]);
            y[static_cast<size_t>(n)] = solve_linear(M, neg_a0inv, rem);
        }
        powers.set_solution_row(n, y[static_cast<size_t>(n)]);
    }
    P.rows = std::move(y);
    return P;
}

namespace detail {

/// x^{p+1} d_q u (DQ) or x^p sigma_q u (SIGMAQ) for a series u of order K.
/// The result has order K for p >= 0 and K - 1 for p = -1.
template <class R>
Series1<R> lhs_operator(const Series1<R>& u, Operator op, int p, const std::vector<R>& c) {
    const int K = u.order();
    const int out_order = (op == Operator::DQ && p == -1) ? K - 1 : K;
    Series1<R> h(std::max(out_order, 0), u.rows(), u.cols());
    // x^{p+1} d_q x^s = [s]_q x^{s+p} and x^p sigma_q x^s = q^s x^{s+p}.
    const int first = op == Operator::DQ ? 1 : 0;
    for (int k = 0; k <= out_order; ++k) {
        const int src = k - p;
        if (src < first || src > K) continue;
        for (int e = 0; e < u.block_size(); ++e) {
            const R& v = u.block(src)[e];
            if (!ring_traits<R>::is_zero(v)) h.block(k)[e] = R(c[static_cast<size_t>(src)] * v);
        }
    }
    return h;
}

}  // namespace detail

/// eps-major preparation: rows are u_n(x), n = 0..Ne/alpha of the reduced
/// system.
template <class R>
Prepared<R> prepare_e_major(const EquationSpec<R>& spec, int Nx, int Ne) {
    require_valid(spec);
    if (Nx < 0 || Ne < 0) throw DomainError("eps-major solve needs Nx, Ne >= 0");
    Prepared<R> P;
    P.x_major = false;
    P.nx = Nx;
    P.ne = Ne;
    P.alpha = spec.alpha;
    P.N = spec.N;
    EquationSpec<R> red = rank_reduce(spec);
    const int K = Ne / spec.alpha;
    // d_q loses one x order per step when p = -1.
    const int W = red.p == -1 ? Nx + K : Nx;
    P.eta_order = K;
    P.working_x = W;
    red.F = detail::pad_data(red.F, W, K);
    const int N = red.N;
    std::vector<R> c = detail::shift_factors(red.op, W + 1, red.q);

    P.initial = newton_slice(e_slice(red.F, 0, W), false, &P.newton_iterations);
    std::vector<Series2<R>> u0;
    for (int l = 0; l < N; ++l) {
        Series2<R> col(W, K);
        for (int n = 0; n <= W; ++n) col.at(n, 0) = P.initial.at(n, l);
        u0.push_back(col);
    }
    red.F = reexpand(red.F, u0);
    if (K >= 1) {
        // eta * L(u0) moves to the right-hand side.
        Series1<R> lu0 = detail::lhs_operator(P.initial, red.op, red.p, c);
        for (int n = 0; n <= std::min(W, lu0.order()); ++n)
            for (int l = 0; l < N; ++l) red.F.b.at(n, 1, l) = R(red.F.b.at(n, 1, l) - lu0.at(n, l));
    }
    P.reduced = red;

    auto brows = detail::extract_rows(red.F.b, false, K);
    auto arows = detail::extract_rows(red.F.A, false, K);
    std::vector<std::pair<MultiIndex, std::vector<Series1<R>>>> nlrows;
    std::vector<MultiIndex> seeds;
    for (const auto& t : red.F.nonlinear) {
        nlrows.emplace_back(t.I, detail::extract_rows(t.coeff, false, K));
        seeds.push_back(t.I);
    }
    detail::RowPowers<R> powers(seeds, N, K);
    const Series1<R>& A0 = arows[0];
    Matrix<R> a0inv = invert(A0.block_matrix(0));

    std::vector<Series1<R>> u(static_cast<size_t>(K) + 1, Series1<R>(W, N, 1));
    powers.set_solution_row(0, u[0]);
    for (int n = 1; n <= K; ++n) {
        const int order_n = red.p == -1 ? W - n : W;
        powers.advance(n, order_n);
        Series1<R> rem = detail::row_remainder(n, brows, arows, nlrows, u, powers);
        Series1<R> lhs = detail::lhs_operator(u[static_cast<size_t>(n - 1)], red.op, red.p, c);
        u[static_cast<size_t>(n)] = crop(solve_linear(A0, a0inv, sub(lhs, rem)), order_n);
        powers.set_solution_row(n, u[static_cast<size_t>(n)]);
    }
    P.rows = std::move(u);
    return P;
}

/// Assembles the eps-table of the original problem from a preparation.
template <class R>
Series2<R> assemble_table(const Prepared<R>& P) {
    const int NA = P.reduced.N;
    const int K = P.eta_order;
    Series2<R> w(P.nx, K, NA, 1);
    if (P.x_major) {
        for (int n = 0; n <= P.nx; ++n)
            for (int m = 0; m <= K; ++m)
                for (int l = 0; l < NA; ++l)
                    w.at(n, m, l) = n == 0 ? P.initial.at(m, l) : P.rows[static_cast<size_t>(n)].at(m, l);
    } else {
        for (int m = 0; m <= K; ++m)
            for (int n = 0; n <= P.nx; ++n)
                for (int l = 0; l < NA; ++l)
                    w.at(n, m, l) = m == 0 ? P.initial.at(n, l) : P.rows[static_cast<size_t>(m)].at(n, l);
    }
    return fold_back(w, P.alpha, P.N, P.ne);
}

template <class R>
SolveResult<R> finish_solve(const Prepared<R>& P, std::chrono::steady_clock::time_point t0) {
    SolveResult<R> res;
    res.table = assemble_table(P);
    res.y0 = slice_x_major(res.table, 0);
    res.u0 = slice_e_major(res.table, 0);
    auto& d = res.diagnostics;
    d.path = P.x_major ? "x-major" : "e-major";
    d.nx = P.nx;
    d.ne = P.ne;
    d.reduced_dim = P.reduced.N;
    d.working_x_order = P.working_x;
    d.working_e_order = P.eta_order;
    d.newton_iterations = P.newton_iterations;
    d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

/// Coefficients a[n][m], n <= Nx, m <= Ne, computed row by row in x.
template <class R>
SolveResult<R> solve_x_major(const EquationSpec<R>& spec, int Nx, int Ne) {
    auto t0 = std::chrono::steady_clock::now();
    return finish_solve(prepare_x_major(spec, Nx, Ne), t0);
}

/// Coefficients a[n][m], n <= Nx, m <= Ne, computed column by column in eps.
template <class R>
SolveResult<R> solve_e_major(const EquationSpec<R>& spec, int Nx, int Ne) {
    auto t0 = std::chrono::steady_clock::now();
    return finish_solve(prepare_e_major(spec, Nx, Ne), t0);
}

/// Compares two tables: exact equality for exact rings, relative distance
/// |a - b| / max(|a|, |b|, 1e-300) <= tol for floats.
template <class R>
CrossCheck compare_tables(const Series2<R>& a, const Series2<R>& b, double tol = 1e-9) {
    CrossCheck cc;
    const int nx = std::min(a.nx(), b.nx());
    const int ne = std::min(a.ne(), b.ne());
    for (int n = 0; n <= nx; ++n)
        for (int m = 0; m <= ne; ++m)
            for (int c = 0; c < a.rows(); ++c) {
                const R& u = a.at(n, m, c);
                const R& v = b.at(n, m, c);
                bool ok = true;
                if constexpr (ring_traits<R>::exact) {
                    ok = u == v;
                    if (!ok) cc.max_discrepancy = std::numeric_limits<double>::infinity();
                } else {
                    const double den = std::max({std::abs(u), std::abs(v), 1e-300});
                    const double rel = std::abs(u - v) / den;
                    cc.max_discrepancy = std::max(cc.max_discrepancy, rel);
                    ok = rel <= tol;
                }
                if (!ok && cc.agree) {
                    cc.agree = false;
                    cc.first_n = n;
                    cc.first_m = m;
                    cc.first_component = c;
                }
            }
    return cc;
}

/// Runs both recurrences on the same problem and compares the tables.
template <class R>
CrossCheck cross_check(const EquationSpec<R>& spec, int Nx, int Ne) {
    auto x = solve_x_major(spec, Nx, Ne);
    auto e = solve_e_major(spec, Nx, Ne);
    return compare_tables(x.table, e.table);
}

/// LHS(y) - F(y) for a table y of N x 1 blocks. Entries with n <= Nx - 1
/// (p = -1) or n <= Nx (p >= 0), m <= Ne are exact; the rest are set to zero.
template <class R>
Series2<R> equation_residual(const EquationSpec<R>& spec, const Series2<R>& y) {
    const int nx = y.nx();
    const int ne = y.ne();
    const int N = spec.N;
    std::vector<Series2<R>> comps;
    for (int l = 0; l < N; ++l) comps.push_back(component(y, l));
    Series2<R> rhs = add(resize(spec.F.b, nx, ne), mul(resize(spec.F.A, nx, ne), y));
    PowerCache<R> cache(comps);
    for (const auto& t : spec.F.nonlinear) rhs = add(rhs, mul(resize(t.coeff, nx, ne), cache.power(t.I)));
    Series2<R> op = spec.op == Operator::DQ ? (nx >= 1 ? dq_x(y, spec.q) : Series2<R>(0, ne, N, 1)) : sigmaq_x(y, spec.q);
    // Multiply by x^{p+1} (d_q) or x^p (sigma_q), then by eps^alpha.
    const int xs = spec.op == Operator::DQ ? spec.p + 1 : spec.p;
    Series2<R> res = neg(rhs);
    const int top = spec.p == -1 ? nx - 1 : nx;
    for (int n = 0; n <= nx; ++n)
        for (int m = 0; m <= ne; ++m)
            for (int i = 0; i < N; ++i) {
                if (n > top) {
                    res.at(n, m, i) = ring_traits<R>::zero();
                    continue;
                }
                const int sn = n - xs;
                const int sm = m - spec.alpha;
                if (sn < 0 || sm < 0 || sn > op.nx()) continue;
                res.at(n, m, i) = R(res.at(n, m, i) + op.at(sn, sm, i));
            }
    return res;
}

/// Converts a problem to another coefficient ring.
template <class S, class R, class Fn>
EquationSpec<S> convert_spec(const EquationSpec<R>& s, const S& q, Fn fn) {
    EquationSpec<S> t;
    t.op = s.op;
    t.p = s.p;
    t.alpha = s.alpha;
    t.N = s.N;
    t.q = q;
    t.require_q_modulus = s.require_q_modulus;
    t.F.b = map_ring<S>(s.F.b, fn);
    t.F.A = map_ring<S>(s.F.A, fn);
    for (const auto& term : s.F.nonlinear) t.F.nonlinear.push_back({term.I, map_ring<S>(term.coeff, fn)});
    return t;
}

}  // namespace qflow
