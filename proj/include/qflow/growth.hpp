#pragma once

// Divergence-rate analytics: q-Gevrey fits, minimal constants with their
// stabilization under window growth, space membership tests, the
// shrinking-disk disciplines of the existence theorems, the U_{q,delta}
// predicate and the q -> 1 confluence study.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qflow/nagumo.hpp"
#include "qflow/qcalc.hpp"
#include "qflow/series.hpp"
#include "qflow/solver.hpp"

namespace qflow {

using PolyLD = std::vector<ComplexLD>;

/// max |f| over K equally spaced points of the circle |x| = radius.
long double sup_on_disk(const PolyLD& f, long double radius, int K);
double sup_on_disk(const Poly& f, double radius, int K);

template <class R>
PolyLD to_poly_ld(const Series1<R>& f, int i = 0) {
    PolyLD p(static_cast<size_t>(f.order()) + 1);
    for (int k = 0; k <= f.order(); ++k) p[static_cast<size_t>(k)] = ring_traits<R>::to_complex(f.at(k, i));
    return p;
}

// ---------------------------------------------------------------- fitting

struct GevreyFit {
    double s = 0;
    double log_A = 0;
    double log_C = 0;
    double residual = 0;     ///< RMS of the log residuals
    int used = 0;
    std::vector<int> masked;  ///< indices skipped because the modulus is zero
};

/// Least squares for log|a_n| = log C + n log A + s (n^2/2) log|q| over
/// lo <= n <= hi. log_moduli[n] = -inf marks a zero coefficient. Throws
/// DomainError with fewer than 4 usable points.
GevreyFit fit_gevrey_log(const std::vector<double>& log_moduli, double q_modulus, int lo, int hi);
/// Same with plain moduli (zeros masked).
GevreyFit fit_gevrey(const std::vector<double>& moduli, double q_modulus, int lo, int hi);

/// log|sum_m a[n][m] eps^m| for n = 0..Nx: the x-coefficients of the table
/// restricted to a fixed eps, evaluated exactly when R is exact.
template <class R>
std::vector<double> eps_ray_log_moduli(const Series2<R>& t, const R& eps) {
    std::vector<double> out;
    for (int n = 0; n <= t.nx(); ++n) {
        R acc = ring_traits<R>::zero();
        R pw = ring_traits<R>::one();
        for (int m = 0; m <= t.ne(); ++m) {
            acc = R(acc + t.at(n, m) * pw);
            pw = R(pw * eps);
        }
        out.push_back(ring_traits<R>::is_zero(acc) ? -std::numeric_limits<double>::infinity()
                                                   : static_cast<double>(ring_traits<R>::log_abs(acc)));
    }
    return out;
}

// ------------------------------------------------------- minimal constants

/// One constraint log|a| - log B <= log C + degree * log A.
struct BoundPoint {
    int degree;
    double log_excess;
};

/// Tightest constants with A >= 1 through the lowest-degree support point:
/// C_anchor is the largest ratio at the anchor degree d0, A the largest slope
/// from it, and C = C_anchor / A^{d0}. Both C_anchor and A can only grow when
/// points are added.
struct MinimalConstants {
    double C = 0;
    double A = 1;
    double C_anchor = 0;
    int anchor = 0;
    bool degenerate = false;  ///< no nonzero coefficient: any C > 0 works
    double log_C = -std::numeric_limits<double>::infinity();
    double log_A = 0;
};

MinimalConstants minimal_constants(const std::vector<BoundPoint>& pts);

struct WindowConstants {
    int end = 0;
    MinimalConstants constants;
    double drift = 0;  ///< relative change of A from the previous window
};

struct Stabilization {
    std::vector<WindowConstants> curve;
    double max_drift = 0;
    double threshold = 0.05;
    bool stable = false;
};

/// Constants on nested windows ending at lo + step, lo + 2 step, ..., hi.
/// points_upto(E) returns the constraints with index <= E.
Stabilization stabilize(const std::function<std::vector<BoundPoint>(int)>& points_upto, int lo, int hi, int step,
                        double threshold);

// ------------------------------------------------------ theorem disciplines

struct SliceSup {
    int n = 0;
    double radius = 0;
    double sup = 0;
    double log_sup = -std::numeric_limits<double>::infinity();
    double log_template = 0;
};

struct DisciplineReport {
    std::string name;            ///< e.g. "y_n on |eps| <= r"
    std::string bound;           ///< e.g. "C A^n |q|^(n^2/2p)"
    std::vector<SliceSup> table;
    MinimalConstants constants;
    Stabilization stabilization;
};

struct MembershipVerdict {
    std::string space;
    bool consistent = false;
    double margin = 0;  ///< threshold - max drift; positive when consistent
    MinimalConstants constants;
    Stabilization stabilization;
    long first_branch = 0;   ///< support points where the |q|^{n^2/2p} branch is the min
    long second_branch = 0;  ///< support points where |q|^{nm/alpha} is the min
};

struct GrowthReport {
    GevreyFit fit;
    bool fit_available = false;
    std::vector<DisciplineReport> disciplines;
    std::vector<MembershipVerdict> membership;
    bool degenerate = false;
};

struct GrowthOptions {
    double r = 0.5;
    int samples = 256;
    int lo = 0;
    int hi = -1;  ///< -1: the whole window
    int step = 5;
    double threshold = 0.05;
};

/// Slice disciplines of the existence theorems on a truncated solution:
///   p > 0:  sup_{|eps| <= r} |y_n|  vs C A^n |q|^{n^2/2p},
///           sup_{|x| <= r/|q|^{floor(n/alpha)}} |u_n| vs C A^n;
///   p = 0:  sup_{|eps| <= r/|q|^{n/alpha}} |y_n| vs C A^n, and the u_n discipline;
///   p = -1: sup_{|x| <= r/|q|^{floor(n/alpha)}} |u_n| vs C A^n |q|^{n^2/2alpha^2}.
/// y_n is the x^n row (a series in eps), u_n the eps^n column.
template <class R>
GrowthReport verify_theorem_bounds(const Series2<R>& table, int p, int alpha, double q_modulus,
                                   const GrowthOptions& opt);

enum class SpaceKind { Ring, Monomial };

struct SpaceSpec {
    SpaceKind kind = SpaceKind::Ring;
    int p = 1;
    int alpha = 1;
    double q_modulus = 2;
};

/// Minimal (C, A) with |a_{n,m}| <= C A^{n+m} B_{n,m} on square windows,
/// B = |q|^{nm} (Ring) or min{|q|^{n^2/2p}, |q|^{nm/alpha}} (Monomial).
template <class R>
MembershipVerdict classify_space(const Series2<R>& table, const SpaceSpec& space, const GrowthOptions& opt);

/// Exponent along the ray m = c n: the ring template gives c (as a multiple
/// of n^2 log|q|), the fit gives s/2.
struct RayFit {
    GevreyFit fit;
    double template_exponent = 0;
    double fitted_exponent = 0;
};

template <class R>
RayFit ray_fit(const Series2<R>& table, int c, double q_modulus);

/// Slice characterization of the ring: sup over |x2| <= r/|q|^n of the x1^n
/// row against D B^n, and the Cauchy recovery |a_{n,m}| <= sup_n (r/|q|^n)^{-m}.
struct SliceCharacterization {
    DisciplineReport slices;
    bool cauchy_ok = true;
    double worst_cauchy_ratio = 0;  ///< max |a_{n,m}| / (sup_n rho_n^{-m})
};

template <class R>
SliceCharacterization slice_characterization(const Series2<R>& table, double q_modulus, const GrowthOptions& opt);

// ------------------------------------------------------------ U_{q,delta}

struct UqMembership {
    bool member = true;
    int first_violation = -1;
    int checked_up_to = 0;  ///< last m tested literally
    int tail_from = -1;     ///< m beyond which the condition holds automatically, -1 if unknown
};

/// |1 - q^m x| > delta^m for all 0 <= m <= M (M < 0: all m, using the tail
/// bound; then the answer is exact whenever a tail index exists).
UqMembership uq_delta_member(Complex x, Complex q, double delta, int M);

// -------------------------------------------------------------- confluence

struct ConfluenceRow {
    Rational q;
    double q_value = 0;
    double max_rel_error = 0;      ///< vs the q = 1 table, over nonzero limit entries
    double bracket_max_rel = 0;    ///< max_{n<=bracket_n} |[n]_q - n| / n
};

struct ConfluenceReport {
    std::vector<ConfluenceRow> rows;
    bool monotone = true;  ///< errors do not increase along the q list
    Series2<Rational> limit;
    MembershipVerdict limit_discipline;  ///< against min{n!^{1/p}, m!^{1/alpha}} (m!^{1/alpha} for p <= 0)
};

/// q_k = 1 + 2^{-k}.
std::vector<Rational> confluence_q_values(int k_lo, int k_hi);

/// Solves a d_q family at each q on the nx x ne window and at q = 1 (no |q|
/// check) on the limit window, compares termwise and checks the limit against
/// C A^{n+m} min{n!^{1/p}, m!^{1/alpha}}; for p <= 0 there is no x-factorial
/// and the template is m!^{1/alpha}. limit_n < 0 uses max(nx, ne).
ConfluenceReport confluence_study(const std::function<EquationSpec<Rational>(const Rational&)>& family,
                                  const std::vector<Rational>& qs, int nx, int ne, const GrowthOptions& opt,
                                  int bracket_n = 20, int limit_n = -1);

// ======================================================== implementations

namespace detail {

inline double neg_inf() { return -std::numeric_limits<double>::infinity(); }

template <class R>
double log_abs_entry(const R& v) {
    if (ring_traits<R>::is_zero(v)) return neg_inf();
    return static_cast<double>(ring_traits<R>::log_abs(v));
}

/// Row n of the table (series in eps) or column m (series in x), as long
/// double polynomials.
template <class R>
PolyLD row_poly(const Series2<R>& t, int n) {
    PolyLD p(static_cast<size_t>(t.ne()) + 1);
    for (int m = 0; m <= t.ne(); ++m) p[static_cast<size_t>(m)] = ring_traits<R>::to_complex(t.at(n, m));
    return p;
}

template <class R>
PolyLD column_poly(const Series2<R>& t, int m) {
    PolyLD p(static_cast<size_t>(t.nx()) + 1);
    for (int n = 0; n <= t.nx(); ++n) p[static_cast<size_t>(n)] = ring_traits<R>::to_complex(t.at(n, m));
    return p;
}

DisciplineReport finish_discipline(std::string name, std::string bound, std::vector<SliceSup> table,
                                   const GrowthOptions& opt, int hi);

}  // namespace detail

template <class R>
GrowthReport verify_theorem_bounds(const Series2<R>& table, int p, int alpha, double q_modulus,
                                   const GrowthOptions& opt) {
    GrowthReport rep;
    const long double lq = std::log(static_cast<long double>(q_modulus));
    const double r = opt.r;
    auto y_disc = [&](bool shrink) {
        std::vector<SliceSup> tab;
        const int hi = opt.hi < 0 ? table.nx() : std::min(opt.hi, table.nx());
        for (int n = opt.lo; n <= hi; ++n) {
            SliceSup s;
            s.n = n;
            const long double rad = shrink ? r / std::pow(static_cast<long double>(q_modulus), static_cast<long double>(n) / alpha)
                                           : static_cast<long double>(r);
            s.radius = static_cast<double>(rad);
            const long double v = sup_on_disk(detail::row_poly(table, n), rad, opt.samples);
            s.sup = static_cast<double>(v);
            s.log_sup = v > 0 ? static_cast<double>(std::log(v)) : detail::neg_inf();
            s.log_template = shrink ? 0.0 : static_cast<double>(static_cast<long double>(n) * n / (2.0L * p) * lq);
            tab.push_back(s);
        }
        return detail::finish_discipline(shrink ? "y_n on |eps| <= r/|q|^(n/alpha)" : "y_n on |eps| <= r",
                                         shrink ? "C A^n" : "C A^n |q|^(n^2/2p)", std::move(tab), opt, hi);
    };
    auto u_disc = [&](bool gaussian) {
        std::vector<SliceSup> tab;
        const int hi = opt.hi < 0 ? table.ne() : std::min(opt.hi, table.ne());
        for (int n = opt.lo; n <= hi; ++n) {
            SliceSup s;
            s.n = n;
            const long double rad = r / std::pow(static_cast<long double>(q_modulus), static_cast<long double>(n / alpha));
            s.radius = static_cast<double>(rad);
            const long double v = sup_on_disk(detail::column_poly(table, n), rad, opt.samples);
            s.sup = static_cast<double>(v);
            s.log_sup = v > 0 ? static_cast<double>(std::log(v)) : detail::neg_inf();
            s.log_template =
                gaussian ? static_cast<double>(static_cast<long double>(n) * n / (2.0L * alpha * alpha) * lq) : 0.0;
            tab.push_back(s);
        }
        return detail::finish_discipline("u_n on |x| <= r/|q|^floor(n/alpha)",
                                         gaussian ? "C A^n |q|^(n^2/2alpha^2)" : "C A^n", std::move(tab), opt, hi);
    };
    if (p > 0) {
        rep.disciplines.push_back(y_disc(false));
        rep.disciplines.push_back(u_disc(false));
    } else if (p == 0) {
        rep.disciplines.push_back(y_disc(true));
        rep.disciplines.push_back(u_disc(false));
    } else {
        rep.disciplines.push_back(u_disc(true));
    }
    // Gevrey fit of the primary slices.
    const auto& prim = rep.disciplines.front().table;
    std::vector<double> logs;
    int lo = prim.empty() ? 0 : prim.front().n;
    for (int n = 0; n < lo; ++n) logs.push_back(detail::neg_inf());
    for (const auto& s : prim) logs.push_back(s.log_sup);
    int usable = 0;
    for (const auto& s : prim) usable += std::isfinite(s.log_sup) ? 1 : 0;
    if (usable >= 4) {
        rep.fit = fit_gevrey_log(logs, q_modulus, lo, static_cast<int>(logs.size()) - 1);
        rep.fit_available = true;
    }
    rep.degenerate = true;
    for (const auto& d : rep.disciplines) rep.degenerate = rep.degenerate && d.constants.degenerate;
    return rep;
}

template <class R>
MembershipVerdict classify_space(const Series2<R>& table, const SpaceSpec& space, const GrowthOptions& opt) {
    MembershipVerdict v;
    const double lq = std::log(space.q_modulus);
    const int top = std::min(table.nx(), table.ne());
    const int hi = opt.hi < 0 ? top : std::min(opt.hi, top);
    v.space = space.kind == SpaceKind::Ring ? "O_0^q"
                                            : "O^q_{x^" + std::to_string(space.p) + " eps^" + std::to_string(space.alpha) + "}";
    // Log-excess of every support point, computed once.
    std::vector<std::vector<double>> excess(static_cast<size_t>(hi) + 1, std::vector<double>(static_cast<size_t>(hi) + 1));
    for (int n = 0; n <= hi; ++n)
        for (int m = 0; m <= hi; ++m) {
            const double la = detail::log_abs_entry(table.at(n, m));
            double lb;
            if (space.kind == SpaceKind::Ring) {
                lb = static_cast<double>(n) * m * lq;
            } else {
                const double b1 = static_cast<double>(n) * n / (2.0 * space.p) * lq;
                const double b2 = static_cast<double>(n) * m / space.alpha * lq;
                lb = std::min(b1, b2);
                if (std::isfinite(la)) (b1 <= b2 ? v.first_branch : v.second_branch)++;
            }
            excess[static_cast<size_t>(n)][static_cast<size_t>(m)] = la - lb;
        }
    auto upto = [&](int E) {
        std::vector<BoundPoint> pts;
        for (int n = 0; n <= E; ++n)
            for (int m = 0; m <= E; ++m) {
                const double e = excess[static_cast<size_t>(n)][static_cast<size_t>(m)];
                if (std::isfinite(e)) pts.push_back({n + m, e});
            }
        return pts;
    };
    v.constants = minimal_constants(upto(hi));
    v.stabilization = stabilize(upto, opt.lo, hi, opt.step, opt.threshold);
    v.consistent = v.stabilization.stable;
    v.margin = opt.threshold - v.stabilization.max_drift;
    return v;
}

template <class R>
RayFit ray_fit(const Series2<R>& table, int c, double q_modulus) {
    RayFit rf;
    std::vector<double> logs;
    for (int n = 0; n <= table.nx() && c * n <= table.ne(); ++n) logs.push_back(detail::log_abs_entry(table.at(n, c * n)));
    rf.fit = fit_gevrey_log(logs, q_modulus, 0, static_cast<int>(logs.size()) - 1);
    rf.template_exponent = c;
    rf.fitted_exponent = rf.fit.s / 2.0;
    return rf;
}

template <class R>
SliceCharacterization slice_characterization(const Series2<R>& table, double q_modulus, const GrowthOptions& opt) {
    SliceCharacterization sc;
    std::vector<SliceSup> tab;
    const int hi = opt.hi < 0 ? table.nx() : std::min(opt.hi, table.nx());
    for (int n = opt.lo; n <= hi; ++n) {
        SliceSup s;
        s.n = n;
        const long double rad = opt.r / std::pow(static_cast<long double>(q_modulus), static_cast<long double>(n));
        s.radius = static_cast<double>(rad);
        const long double v = sup_on_disk(detail::row_poly(table, n), rad, opt.samples);
        s.sup = static_cast<double>(v);
        s.log_sup = v > 0 ? static_cast<double>(std::log(v)) : detail::neg_inf();
        for (int m = 0; m <= table.ne(); ++m) {
            const double la = detail::log_abs_entry(table.at(n, m));
            if (!std::isfinite(la)) continue;
            // Cauchy: |a_{n,m}| <= sup_n / rad^m.
            const double bound = s.log_sup - m * static_cast<double>(std::log(rad));
            const double ratio = std::exp(la - bound);
            sc.worst_cauchy_ratio = std::max(sc.worst_cauchy_ratio, ratio);
            if (ratio > 1.0 + 1e-9) sc.cauchy_ok = false;
        }
        tab.push_back(s);
    }
    sc.slices = detail::finish_discipline("x1^n row on |x2| <= r/|q|^n", "D B^n", std::move(tab), opt, hi);
    return sc;
}

}  // namespace qflow
