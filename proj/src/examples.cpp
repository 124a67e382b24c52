#include "qflow/examples.hpp"

#include <algorithm>

namespace qflow {

const std::vector<ExampleInfo>& example_registry() {
    static const std::vector<ExampleInfo> reg = {
        {"euler-q", "eps x^2 d_q y = y - x", "a[m+1][m] = [m]!_q, zero elsewhere", Operator::DQ, 1, false, 12, 11, "2"},
        {"geom-q", "eps x sigma_q y = y - 1", "a[n][n] = q^(n(n-1)/2), zero elsewhere", Operator::SIGMAQ, 1, false, 12, 12,
         "2"},
        {"heine", "eps^alpha sigma_q y = (1 - x) y - 1", "a[n][alpha m] = [n+m choose m]_q, zero elsewhere",
         Operator::SIGMAQ, 0, true, 15, 15, "3/2"},
        {"dq-p0", "eps^alpha x d_q y = y - sum_n x^n", "a[n][alpha m] = [n]_q^m (0^0 = 1), zero elsewhere", Operator::DQ,
         0, true, 12, 12, "2"},
        {"sigma-shift", "eps x^p sigma_q y = y - f(x, eps), f = (1+2x) + (x-x^2) eps + 3 eps^2",
         "u_n(x) = sum_j q^(p j(j-1)/2) x^(jp) f_(n-j)(q^j x)", Operator::SIGMAQ, 1, false, 12, 8, "3/2"},
        {"sigma-x2", "eps x^2 sigma_q y = y - x", "a[2n+1][n] = q^(n^2), zero elsewhere", Operator::SIGMAQ, 2, false, 25,
         12, "2"},
        {"dq-p1-geom", "eps x^2 d_q y = y - sum_n x^n", "a[k][m] = [k-m]_q [k-m+1]_q ... [k-1]_q", Operator::DQ, 1, false,
         12, 12, "2"},
        {"dq-p1-pm", "eps x^2 d_q y = (1 + x) y - x eps", "y_n(eps) = eps prod_{j=1}^{n-1} ([j]_q eps - 1)",
         Operator::DQ, 1, false, 12, 12, "2"},
        {"dq-pminus1", "eps^alpha d_q y = y - 1/(1-x) (truncated)", "a[n][alpha m] = [n+m]!_q / [n]!_q, zero elsewhere",
         Operator::DQ, -1, true, 10, 10, "2"},
        {"model-M", "eps sigma_q y = y - 1/(1-x) (truncated)", "a[n][m] = q^(nm)", Operator::SIGMAQ, 0, false, 12, 12,
         "2"},
    };
    return reg;
}

const ExampleInfo& find_example(const std::string& id) {
    for (const auto& e : example_registry())
        if (e.id == id) return e;
    throw DomainError("unknown example id: " + id);
}

// ---------------------------------------------------------------- XQPoly

namespace {

void trim(XQPoly& p) {
    while (!p.c.empty() && p.c.back().is_zero()) p.c.pop_back();
}

XQPoly xq_add(const XQPoly& a, const XQPoly& b) {
    XQPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] += b.c[i];
    trim(r);
    return r;
}

XQPoly xq_scale(const XQPoly& a, const QPoly& s) {
    XQPoly r;
    for (const auto& c : a.c) r.c.push_back(c * s);
    trim(r);
    return r;
}

/// d_q in x: x^k -> [k]_q x^{k-1}.
XQPoly xq_dq(const XQPoly& a) {
    XQPoly r;
    QPoly bracket;
    for (size_t k = 1; k < a.c.size(); ++k) {
        bracket += QPoly::monomial(Rational(1), static_cast<int>(k) - 1);
        r.c.push_back(bracket * a.c[k]);
    }
    trim(r);
    return r;
}

XQPoly one_plus(const QPoly& coeff_of_x) { return XQPoly{{QPoly(1L), coeff_of_x}}; }

}  // namespace

XQPoly xq_mul(const XQPoly& a, const XQPoly& b) {
    XQPoly r;
    if (a.c.empty() || b.c.empty()) return r;
    r.c.resize(a.c.size() + b.c.size() - 1);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (a.c[i].is_zero()) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            if (!b.c[j].is_zero()) r.c[i + j] += a.c[i] * b.c[j];
    }
    trim(r);
    return r;
}

int XQPoly::x_degree() const { return static_cast<int>(c.size()) - 1; }

int XQPoly::q_degree() const {
    int d = -1;
    for (const auto& p : c) d = std::max(d, p.degree());
    return d;
}

size_t XQPoly::term_count() const {
    size_t n = 0;
    for (const auto& p : c) n += p.term_count();
    return n;
}

std::pair<int, int> XQPoly::leading_exponents() const {
    if (c.empty()) return {-1, -1};
    return {x_degree(), c.back().degree()};
}

std::string XQPoly::to_string() const {
    if (c.empty()) return "0";
    std::string out;
    for (size_t k = c.size(); k-- > 0;) {
        if (c[k].is_zero()) continue;
        std::string coef = c[k].to_string();
        std::string mono = k == 0 ? "" : (k == 1 ? "x" : "x^" + std::to_string(k));
        std::string term;
        if (mono.empty())
            term = "(" + coef + ")";
        else if (coef == "1")
            term = mono;
        else
            term = "(" + coef + ")*" + mono;
        out += out.empty() ? term : " + " + term;
    }
    return out;
}

bool operator==(const XQPoly& a, const XQPoly& b) { return a.c == b.c; }

std::vector<XQPoly> pm_ladder(int m_max) {
    if (m_max < 1) throw DomainError("pm_ladder needs m_max >= 1");
    std::vector<XQPoly> out{XQPoly{{QPoly(1L)}}};
    const QPoly q = QPoly::q();
    const QPoly q_minus_1 = q - QPoly(1L);
    XQPoly one_x_pow = XQPoly{{QPoly(1L)}};   // (1+x)^m
    XQPoly poch = XQPoly{{QPoly(1L)}};        // (-qx;q)_m = prod_{j=1}^m (1 + q^j x)
    QPoly qm(1L);                              // q^m
    for (int m = 1; m < m_max; ++m) {
        one_x_pow = xq_mul(one_x_pow, one_plus(QPoly(1L)));
        poch = xq_mul(poch, one_plus(QPoly::monomial(Rational(1), m)));
        qm = qm * q;
        const XQPoly& P = out.back();
        const XQPoly lead = xq_scale(one_x_pow, qm);
        XQPoly diff = xq_add(lead, xq_scale(poch, QPoly(-1L)));
        for (auto& cf : diff.c) cf = cf.exact_div(q_minus_1);
        out.push_back(xq_add(xq_mul(lead, xq_mul(XQPoly{{QPoly(), QPoly(1L)}}, xq_dq(P))), xq_mul(diff, P)));
    }
    return out;
}

XQPoly pm_denominator(int m) {
    XQPoly d{{QPoly(1L)}};
    for (int j = 0; j < m; ++j) {
        const XQPoly f = one_plus(QPoly::monomial(Rational(1), j));
        for (int e = 0; e < m - j; ++e) d = xq_mul(d, f);
    }
    return d;
}

namespace {

XQPoly from_strings(const std::vector<std::pair<int, const char*>>& by_x_degree) {
    XQPoly p;
    for (const auto& [k, text] : by_x_degree) {
        if (static_cast<int>(p.c.size()) <= k) p.c.resize(static_cast<size_t>(k) + 1);
        p.c[static_cast<size_t>(k)] = QPoly::parse(text);
    }
    trim(p);
    return p;
}

}  // namespace

XQPoly pm_printed(int m) {
    switch (m) {
        case 2:
            return from_strings({{0, "1"}});
        case 3:
            return from_strings({{0, "q + 1"}, {1, "q"}, {2, "-q^2"}});
        case 4:
            return from_strings({{5, "q^7"},
                                 {4, "-3*q^6 - 2*q^5"},
                                 {3, "-4*q^6 - 6*q^5 - 3*q^4 - 2*q^3"},
                                 {2, "-q^6 - 2*q^5 - q^4 - q^3"},
                                 {1, "q^4 + 3*q^3 + 4*q^2 + 2*q"},
                                 {0, "q^3 + 2*q^2 + 2*q + 1"}});
        case 5:
            return from_strings(
                {{9, "-q^16"},
                 {8, "6*q^15 + 7*q^14 + 3*q^13"},
                 {7, "10*q^15 + 19*q^14 + 14*q^13 + 8*q^12 + 5*q^11 + 3*q^10"},
                 {6, "5*q^15 + 11*q^14 + 4*q^13 - 7*q^12 - 12*q^11 - 8*q^10 - 6*q^9 - q^8"},
                 {5, "q^15 + 2*q^14 - 8*q^13 - 35*q^12 - 64*q^11 - 71*q^10 - 61*q^9 - 40*q^8 - 19*q^7 - 6*q^6"},
                 {4, "-3*q^13 - 22*q^12 - 55*q^11 - 84*q^10 - 98*q^9 - 93*q^8 - 69*q^7 - 37*q^6 - 12*q^5 - 3*q^4"},
                 {3, "-4*q^12 - 15*q^11 - 30*q^10 - 44*q^9 - 54*q^8 - 50*q^7 - 34*q^6 - 18*q^5 - 8*q^4 - 2*q^3"},
                 {2, "-q^11 - 3*q^10 - 5*q^9 - 5*q^8 + 10*q^6 + 15*q^5 + 13*q^4 + 8*q^3 + 2*q^2"},
                 {1, "q^8 + 4*q^7 + 11*q^6 + 18*q^5 + 21*q^4 + 18*q^3 + 10*q^2 + 3*q"},
                 {0, "q^6 + 3*q^5 + 5*q^4 + 6*q^3 + 5*q^2 + 3*q + 1"}});
        default:
            throw DomainError("no printed P_m for m = " + std::to_string(m));
    }
}

PmLadderCheck check_pm_ladder(int m_max, int solver_m, int nx) {
    PmLadderCheck out;
    out.ladder = pm_ladder(m_max);
    solver_m = std::min(solver_m, m_max);
    Series2<QPoly> table;
    if (solver_m >= 1) {
        ExampleParams prm;
        prm.nx = nx;
        prm.ne = solver_m;
        table = solve_e_major(example_spec("dq-p1-pm", QPoly::q(), prm), nx, solver_m).table;
    }
    for (int m = 1; m <= m_max; ++m) {
        const XQPoly& P = out.ladder[static_cast<size_t>(m - 1)];
        PmLadderRow row;
        row.m = m;
        row.x_degree = P.x_degree();
        row.q_degree = P.q_degree();
        row.terms = P.term_count();
        row.leading = P.leading_exponents();
        if (m >= 2)
            row.degrees_ok = row.x_degree == m * (m - 1) / 2 - 1 && row.q_degree == (m - 1) * (m - 2) * (m + 3) / 6;
        if (m >= 2 && m <= 5) row.printed = P == pm_printed(m) ? 1 : 0;
        if (m <= solver_m) {
            XQPoly u;
            for (int n = 0; n <= nx; ++n) u.c.push_back(table.at(n, m));
            const XQPoly lhs = xq_mul(u, pm_denominator(m));
            row.solver = 1;
            for (int n = 0; n <= nx; ++n) {
                const QPoly got = n < static_cast<int>(lhs.c.size()) ? lhs.c[static_cast<size_t>(n)] : QPoly();
                const int k = n - m;
                const QPoly want = k >= 0 && k < static_cast<int>(P.c.size()) ? P.c[static_cast<size_t>(k)] : QPoly();
                if (got != want) row.solver = 0;
            }
        }
        out.ok = out.ok && row.degrees_ok && row.printed != 0 && row.solver != 0;
        out.rows.push_back(row);
    }
    return out;
}

// ------------------------------------------------------------ random specs

EquationSpec<Rational> random_spec(std::mt19937_64& rng, const RandomSpecPlan& plan) {
    std::uniform_int_distribution<int> dim(1, plan.max_dim);
    std::uniform_int_distribution<size_t> pick_p(0, plan.p_values.size() - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> small(-3, 3);
    std::uniform_int_distribution<int> den(1, 3);
    auto rnd = [&] {
        Rational v(small(rng), den(rng));
        v.canonicalize();
        return v;
    };

    EquationSpec<Rational> s;
    s.op = coin(rng) ? Operator::DQ : Operator::SIGMAQ;
    s.N = dim(rng);
    s.p = plan.p_values[pick_p(rng)];
    if (s.p == -1) s.op = Operator::DQ;
    std::uniform_int_distribution<size_t> pick_alpha(0, plan.alpha_values.size() - 1);
    s.alpha = plan.alpha_values[pick_alpha(rng)];
    s.q = plan.q;
    const int N = s.N;
    const int D = plan.data_degree;
    s.F.b = Series2<Rational>(D, D, N, 1);
    for (int n = 0; n <= D; ++n)
        for (int m = 0; m <= D; ++m)
            for (int i = 0; i < N; ++i)
                if ((n || m) && coin(rng)) s.F.b.at(n, m, i) = rnd();
    s.F.A = Series2<Rational>(D, D, N, N);
    for (int n = 0; n <= D; ++n)
        for (int m = 0; m <= D; ++m)
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    if ((n || m) && coin(rng) && coin(rng)) s.F.A.at(n, m, i, j) = rnd();
    // Unit lower-triangular times a nonzero diagonal keeps A(0,0) invertible.
    for (int i = 0; i < N; ++i) {
        Rational d = rnd();
        while (sgn(d) == 0) d = rnd();
        s.F.A.at(0, 0, i, i) = d;
        for (int j = 0; j < i; ++j) s.F.A.at(0, 0, i, j) = rnd();
    }
    NonlinearTerm<Rational> t;
    t.I.assign(static_cast<size_t>(N), 0);
    std::uniform_int_distribution<int> comp(0, N - 1);
    ++t.I[static_cast<size_t>(comp(rng))];
    ++t.I[static_cast<size_t>(comp(rng))];
    t.coeff = Series2<Rational>(1, 1, N, 1);
    for (int n = 0; n <= 1; ++n)
        for (int m = 0; m <= 1; ++m)
            for (int i = 0; i < N; ++i)
                if (coin(rng)) t.coeff.at(n, m, i) = rnd();
    s.F.nonlinear.push_back(std::move(t));
    return s;
}

}  // namespace qflow
