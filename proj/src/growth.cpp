#include "qflow/growth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <numbers>

namespace qflow {

long double sup_on_disk(const PolyLD& f, long double radius, int K) {
    if (!(radius > 0)) throw DomainError("sup_on_disk needs radius > 0");
    K = std::max(K, 1);
    long double best = 0;
    for (int k = 0; k < K; ++k) {
        const long double a = 2 * std::numbers::pi_v<long double> * k / K;
        const ComplexLD x = std::polar(radius, a);
        ComplexLD acc(0, 0);
        for (size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
        best = std::max(best, std::abs(acc));
    }
    return best;
}

double sup_on_disk(const Poly& f, double radius, int K) {
    PolyLD g(f.begin(), f.end());
    return static_cast<double>(sup_on_disk(g, static_cast<long double>(radius), K));
}

GevreyFit fit_gevrey_log(const std::vector<double>& log_moduli, double q_modulus, int lo, int hi) {
    GevreyFit fit;
    hi = std::min(hi, static_cast<int>(log_moduli.size()) - 1);
    std::vector<int> idx;
    for (int n = std::max(lo, 0); n <= hi; ++n) {
        if (std::isfinite(log_moduli[static_cast<size_t>(n)]))
            idx.push_back(n);
        else
            fit.masked.push_back(n);
    }
    if (idx.size() < 4) throw DomainError("fit_gevrey needs at least 4 nonzero moduli");
    const double lq = std::log(q_modulus);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(idx.size()), 3);
    Eigen::VectorXd y(static_cast<Eigen::Index>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) {
        const double n = idx[i];
        const auto r = static_cast<Eigen::Index>(i);
        X(r, 0) = 1.0;
        X(r, 1) = n;
        X(r, 2) = n * n / 2.0 * lq;
        y(r) = log_moduli[static_cast<size_t>(idx[i])];
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    fit.log_C = beta(0);
    fit.log_A = beta(1);
    fit.s = beta(2);
    fit.residual = std::sqrt((X * beta - y).squaredNorm() / static_cast<double>(idx.size()));
    fit.used = static_cast<int>(idx.size());
    return fit;
}

GevreyFit fit_gevrey(const std::vector<double>& moduli, double q_modulus, int lo, int hi) {
    std::vector<double> logs;
    logs.reserve(moduli.size());
    for (double v : moduli) logs.push_back(v > 0 ? std::log(v) : -std::numeric_limits<double>::infinity());
    return fit_gevrey_log(logs, q_modulus, lo, hi);
}

MinimalConstants minimal_constants(const std::vector<BoundPoint>& pts) {
    MinimalConstants mc;
    if (pts.empty()) {
        mc.degenerate = true;
        return mc;
    }
    int d0 = pts.front().degree;
    for (const auto& p : pts) d0 = std::min(d0, p.degree);
    double log_c0 = -std::numeric_limits<double>::infinity();
    for (const auto& p : pts)
        if (p.degree == d0) log_c0 = std::max(log_c0, p.log_excess);
    double log_a = 0;
    for (const auto& p : pts)
        if (p.degree > d0) log_a = std::max(log_a, (p.log_excess - log_c0) / (p.degree - d0));
    mc.anchor = d0;
    mc.log_A = log_a;
    mc.log_C = log_c0 - d0 * log_a;
    mc.A = std::exp(log_a);
    mc.C = std::exp(mc.log_C);
    mc.C_anchor = std::exp(log_c0);
    return mc;
}

Stabilization stabilize(const std::function<std::vector<BoundPoint>(int)>& points_upto, int lo, int hi, int step,
                        double threshold) {
    Stabilization st;
    st.threshold = threshold;
    step = std::max(step, 1);
    std::vector<int> ends;
    for (int e = lo + step; e <= hi; e += step) ends.push_back(e);
    if (ends.empty() || ends.back() != hi) ends.push_back(hi);
    bool all_degenerate = true;
    for (int e : ends) {
        WindowConstants w;
        w.end = e;
        w.constants = minimal_constants(points_upto(e));
        all_degenerate = all_degenerate && w.constants.degenerate;
        if (!st.curve.empty()) {
            const double prev = st.curve.back().constants.A;
            w.drift = std::abs(w.constants.A - prev) / prev;
            st.max_drift = std::max(st.max_drift, w.drift);
        }
        st.curve.push_back(w);
    }
    st.stable = all_degenerate || (st.curve.size() >= 2 && st.max_drift < threshold);
    return st;
}

namespace detail {

DisciplineReport finish_discipline(std::string name, std::string bound, std::vector<SliceSup> table,
                                   const GrowthOptions& opt, int hi) {
    DisciplineReport d;
    d.name = std::move(name);
    d.bound = std::move(bound);
    d.table = std::move(table);
    auto upto = [&](int E) {
        std::vector<BoundPoint> pts;
        for (const auto& s : d.table)
            if (s.n <= E && std::isfinite(s.log_sup)) pts.push_back({s.n, s.log_sup - s.log_template});
        return pts;
    };
    d.constants = minimal_constants(upto(hi));
    d.stabilization = stabilize(upto, opt.lo, hi, opt.step, opt.threshold);
    return d;
}

}  // namespace detail

UqMembership uq_delta_member(Complex x, Complex q, double delta, int M) {
    if (!(std::abs(q) > 1.0)) throw DomainError("uq_delta_member needs |q| > 1");
    if (!(delta > 0)) throw DomainError("uq_delta_member needs delta > 0");
    UqMembership res;
    const long double qa = std::abs(q);
    const long double xa = std::abs(x);
    // For m past the tail index, |1 - q^m x| >= |x||q|^m - 1 > delta^m.
    if (xa > 0 && delta < qa) {
        const long double grow = qa / std::max<long double>(delta, 1.0L);
        int m = 0;
        while (m < 100000 && !(xa * std::pow(grow, m) > 2.0L && xa * std::pow(qa, m) > 2.0L)) ++m;
        if (m < 100000) res.tail_from = m;
    }
    int last = M;
    if (M < 0) {
        if (res.tail_from < 0) throw DomainError("uq_delta_member: no tail bound, give a finite M");
        last = res.tail_from;
    } else if (res.tail_from >= 0) {
        last = std::min(M, res.tail_from);
    }
    ComplexLD qm(1, 0);
    const ComplexLD xl(x.real(), x.imag());
    const ComplexLD ql(q.real(), q.imag());
    for (int m = 0; m <= last; ++m) {
        res.checked_up_to = m;
        const long double lhs = std::abs(1.0L - qm * xl);
        if (!(lhs > std::pow(static_cast<long double>(delta), m))) {
            res.member = false;
            res.first_violation = m;
            return res;
        }
        qm *= ql;
    }
    return res;
}

std::vector<Rational> confluence_q_values(int k_lo, int k_hi) {
    std::vector<Rational> out;
    for (int k = k_lo; k <= k_hi; ++k) {
        mpz_class den = 1;
        den <<= k;
        Rational q(den + 1, den);
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

namespace {

Series2<Rational> solve_family(EquationSpec<Rational> s, int nx, int ne) {
    return s.p >= 0 ? solve_x_major(s, nx, ne).table : solve_e_major(s, nx, ne).table;
}

}  // namespace

ConfluenceReport confluence_study(const std::function<EquationSpec<Rational>(const Rational&)>& family,
                                  const std::vector<Rational>& qs, int nx, int ne, const GrowthOptions& opt,
                                  int bracket_n, int limit_n) {
    ConfluenceReport rep;
    EquationSpec<Rational> lim = family(Rational(1));
    if (lim.op != Operator::DQ) throw DomainError("confluence study needs the d_q operator");
    lim.require_q_modulus = false;
    if (limit_n < 0) limit_n = std::max(nx, ne);
    limit_n = std::max({limit_n, nx, ne});
    rep.limit = solve_family(lim, limit_n, limit_n);
    const int N = lim.N;

    for (const auto& q : qs) {
        ConfluenceRow row;
        row.q = q;
        row.q_value = q.get_d();
        auto t = solve_family(family(q), nx, ne);
        for (int n = 0; n <= nx; ++n)
            for (int m = 0; m <= ne; ++m)
                for (int c = 0; c < N; ++c) {
                    const Rational& a = t.at(n, m, c);
                    const Rational& b = rep.limit.at(n, m, c);  // limit window contains this one
                    Rational diff = a - b;
                    const double den = sgn(b) == 0 ? 1.0 : std::abs(b.get_d());
                    row.max_rel_error = std::max(row.max_rel_error, std::abs(diff.get_d()) / den);
                }
        for (int n = 1; n <= bracket_n; ++n) {
            Rational diff = q_bracket(n, q) - n;
            row.bracket_max_rel = std::max(row.bracket_max_rel, std::abs(diff.get_d()) / n);
        }
        if (!rep.rows.empty() && row.max_rel_error > rep.rows.back().max_rel_error) rep.monotone = false;
        rep.rows.push_back(row);
    }

    // Limit table against C A^{n+m} min{n!^{1/p}, m!^{1/alpha}}.
    const int p = lim.p;
    const int alpha = lim.alpha;
    const int hi = opt.hi < 0 ? limit_n : std::min(opt.hi, limit_n);
    MembershipVerdict& v = rep.limit_discipline;
    v.space = p > 0 ? "min{n!^(1/" + std::to_string(p) + "), m!^(1/" + std::to_string(alpha) + ")}"
                    : "m!^(1/" + std::to_string(alpha) + ")";
    auto upto = [&](int E) {
        std::vector<BoundPoint> pts;
        for (int n = 0; n <= E; ++n)
            for (int m = 0; m <= E; ++m) {
                double la = -std::numeric_limits<double>::infinity();
                for (int c = 0; c < N; ++c) la = std::max(la, detail::log_abs_entry(rep.limit.at(n, m, c)));
                if (!std::isfinite(la)) continue;
                const double b2 = static_cast<double>(log_factorial(m)) / alpha;
                const double b = p > 0 ? std::min(static_cast<double>(log_factorial(n)) / p, b2) : b2;
                pts.push_back({n + m, la - b});
            }
        return pts;
    };
    v.constants = minimal_constants(upto(hi));
    v.stabilization = stabilize(upto, opt.lo, hi, opt.step, opt.threshold);
    v.consistent = v.stabilization.stable;
    v.margin = opt.threshold - v.stabilization.max_drift;
    return rep;
}

}  // namespace qflow
