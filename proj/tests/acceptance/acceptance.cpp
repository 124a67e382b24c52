// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance --digest   print the exact-ring digest used by criterion 9

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "qflow/examples.hpp"
#include "qflow/growth.hpp"
#include "qflow/io.hpp"
#include "qflow/nagumo.hpp"
#include "qflow/solver.hpp"

using namespace qflow;

namespace {

// Pinned tolerances.
constexpr double kNormSlack = 1.02;
constexpr double kTightnessTol = 1e-12;
constexpr double kFitLo = 0.95;
constexpr double kFitHi = 1.05;
constexpr double kGeomTol = 1e-6;
constexpr double kDriftThreshold = 0.05;
constexpr double kBracketTol = 1e-4;
constexpr double kDiagonalTol = 1e-3;
constexpr std::uint64_t kRandomSeed = 20240611;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

template <class R>
Series2<R> solve_path(const EquationSpec<R>& s, int nx, int ne, bool x_major) {
    return x_major ? solve_x_major(s, nx, ne).table : solve_e_major(s, nx, ne).table;
}

// ------------------------------------------------------------ criterion 1

Outcome pm_golden() {
    Outcome o;
    const PmLadderCheck pm = check_pm_ladder(8, 0, 0);
    for (int m = 2; m <= 5; ++m)
        if (pm.rows[static_cast<size_t>(m - 1)].printed != 1) {
            o.pass = false;
            o.detail += "P_" + std::to_string(m) + " differs from the printed form; ";
        }
    const auto& p6 = pm.rows[5];
    if (p6.terms != 203 || p6.leading != std::pair<int, int>{14, 30}) {
        o.pass = false;
        o.detail += "P_6 has " + std::to_string(p6.terms) + " terms, leading x^" + std::to_string(p6.leading.first) + " q^" +
                    std::to_string(p6.leading.second) + "; ";
    }
    for (int m = 2; m <= 8; ++m) {
        const auto& r = pm.rows[static_cast<size_t>(m - 1)];
        if (r.x_degree != m * (m - 1) / 2 - 1 || r.q_degree != (m - 1) * (m - 2) * (m + 3) / 6) {
            o.pass = false;
            o.detail += "degree formula fails at m=" + std::to_string(m) + "; ";
        }
    }
    if (o.pass) o.detail = "P_2..P_5 exact, P_6: 203 terms, x^14 q^30, degrees hold for m = 2..8";
    return o;
}

// ------------------------------------------------------------ criterion 2

Outcome heine() {
    Outcome o;
    const Rational q(3, 2);
    const int W = 15;
    for (int alpha : {1, 2}) {
        ExampleParams prm;
        prm.nx = prm.ne = W;
        prm.alpha = alpha;
        const auto spec = example_spec("heine", q, prm);
        for (bool x : {true, false}) {
            const auto t = solve_path(spec, W, W, x);
            for (int n = 0; n <= W; ++n)
                for (int k = 0; k <= W; ++k) {
                    const Rational want = k % alpha == 0 ? q_binomial_at(n + k / alpha, k / alpha, q) : Rational(0);
                    if (t.at(n, k) != want && o.pass) {
                        o.pass = false;
                        o.detail = "alpha=" + std::to_string(alpha) + (x ? " x-major" : " e-major") + " mismatch at n=" +
                                   std::to_string(n) + " m=" + std::to_string(k);
                    }
                }
        }
    }
    if (o.pass) o.detail = "alpha in {1,2}, 15x15, q = 3/2, both recurrences, every entry exact";
    return o;
}

// ------------------------------------------------------------ criterion 3

Outcome diagonals() {
    Outcome o;
    auto fail = [&](const std::string& s) {
        if (o.pass) o.detail = s;
        o.pass = false;
    };
    const Rational q(2);
    {
        ExampleParams prm;
        prm.nx = 25;
        prm.ne = 12;
        const auto t = solve_x_major(example_spec("sigma-x2", q, prm), 25, 12).table;
        for (int n = 0; n <= 12; ++n) {
            Rational want = 1;
            for (int i = 0; i < n * n; ++i) want *= q;
            if (t.at(2 * n + 1, n) != want) fail("sigma-x2 diagonal at n=" + std::to_string(n));
        }
    }
    {
        ExampleParams prm;
        prm.nx = prm.ne = 12;
        const auto t = solve_x_major(example_spec("dq-p1-pm", q, prm), 12, 12).table;
        for (int n = 1; n <= 12; ++n) {
            // [n-1]!_q as a product of (q^j - 1)/(q - 1).
            Rational want = 1;
            Rational qj = 1;
            for (int j = 1; j <= n - 1; ++j) {
                qj *= q;
                want *= Rational(qj - 1) / Rational(q - 1);
            }
            if (t.at(n, n) != want) fail("dq-p1-pm diagonal at n=" + std::to_string(n));
        }
    }
    for (int alpha : {1, 2}) {
        ExampleParams prm;
        prm.nx = prm.ne = 10;
        prm.alpha = alpha;
        const auto t = solve_e_major(example_spec("dq-pminus1", q, prm), 10, 10).table;
        for (int n = 0; n <= 10; ++n)
            for (int k = 0; k <= 10; ++k) {
                Rational want = 0;
                if (k % alpha == 0) want = q_factorial(n + k / alpha, q) / q_factorial(n, q);
                if (t.at(n, k) != want)
                    fail("dq-pminus1 alpha=" + std::to_string(alpha) + " at n=" + std::to_string(n) + " m=" + std::to_string(k));
            }
    }
    if (o.pass)
        o.detail = "a[2n+1][n] = q^(n^2) (n <= 12), a[n][n] = [n-1]!_q (n <= 12), a[n][alpha m] = [n+m]!_q/[n]!_q on 10x10";
    return o;
}

// ------------------------------------------------------------ criterion 4

std::vector<EquationSpec<Rational>> random_specs() {
    std::mt19937_64 rng(kRandomSeed);
    RandomSpecPlan plan;
    plan.max_dim = 2;
    plan.p_values = {0, 1, 2};
    std::vector<EquationSpec<Rational>> out;
    for (int k = 0; k < 10; ++k) out.push_back(random_spec(rng, plan));
    return out;
}

Outcome cross_path() {
    Outcome o;
    int k = 0;
    for (const auto& s : random_specs()) {
        const CrossCheck cc = cross_check(s, 12, 12);
        if (!cc.agree && o.pass) {
            o.pass = false;
            o.detail = "spec " + std::to_string(k) + " disagrees at n=" + std::to_string(cc.first_n) +
                       " m=" + std::to_string(cc.first_m);
        }
        ++k;
    }
    if (o.pass) o.detail = "10 random specs (N <= 2, p in {0,1,2}, one quadratic term), 12x12, identical tables";
    return o;
}

// ------------------------------------------------------------ criterion 5

Outcome norm_suite() {
    Outcome o;
    const std::vector<std::pair<std::string, Complex>> qs = {
        {"3/2", Complex(1.5, 0.0)},
        {"2", Complex(2.0, 0.0)},
        {"1.2e^(i pi/7)", std::polar(1.2, std::numbers::pi / 7)}};
    std::string detail;
    for (const auto& [name, q] : qs) {
        NagumoContext ctx;
        ctx.r = 1.0;
        ctx.q = q;
        NormSamplePlan plan;
        plan.count = 500;
        plan.n_max = 5;
        plan.m_max = 5;
        plan.slack = kNormSlack;
        const NormReport r = check_norm_inequalities(plan, ctx);
        const double tight_err = std::abs(r.tightness_ratio - r.tightness_expected);
        if (!r.violations.empty() || tight_err > kTightnessTol) o.pass = false;
        detail += "q=" + name + ": " + std::to_string(r.checks) + " checks, " + std::to_string(r.violations.size()) +
                  " violations, tightness error " + fmt(tight_err);
        detail += name == qs.back().first ? "" : "; ";
    }
    o.detail = detail;
    return o;
}

// ------------------------------------------------------------ criterion 6

std::vector<double> diagonal_logs(const Series2<Rational>& t, int shift, int count) {
    std::vector<double> out;
    for (int n = 0; n < count; ++n) out.push_back(detail::log_abs_entry(t.at(n + shift, n)));
    return out;
}

Outcome growth_fits() {
    Outcome o;
    const Rational q(2);
    ExampleParams prm;
    prm.nx = 61;
    prm.ne = 60;
    // E_q: a[n+1][n] = [n]!_q.
    const auto e = solve_x_major(example_spec("euler-q", q, prm), 61, 60).table;
    const GevreyFit fe = fit_gevrey_log(diagonal_logs(e, 1, 61), 2.0, 10, 60);
    // Y_q: a[n][n] = q^(n(n-1)/2).
    prm.nx = prm.ne = 60;
    const auto y = solve_x_major(example_spec("geom-q", q, prm), 60, 60).table;
    const GevreyFit fy = fit_gevrey_log(diagonal_logs(y, 0, 61), 2.0, 10, 60);
    // Geometric controls: the first eps-column of model-M (2^n) and 3 (5/2)^n.
    const auto mm = solve_x_major(example_spec("model-M", q, prm), 60, 1).table;
    std::vector<double> g1;
    for (int n = 0; n <= 60; ++n) g1.push_back(detail::log_abs_entry(mm.at(n, 1)));
    std::vector<double> g2;
    for (int n = 0; n <= 60; ++n) g2.push_back(std::log(3.0) + n * std::log(2.5));
    const GevreyFit fg1 = fit_gevrey_log(g1, 2.0, 10, 60);
    const GevreyFit fg2 = fit_gevrey_log(g2, 2.0, 10, 60);
    o.pass = fe.s >= kFitLo && fe.s <= kFitHi && fy.s >= kFitLo && fy.s <= kFitHi && std::abs(fg1.s) <= kGeomTol &&
             std::abs(fg2.s) <= kGeomTol;
    o.detail = "s(E_q) = " + fmt(fe.s) + ", s(Y_q) = " + fmt(fy.s) + ", geometric s = " + fmt(fg1.s) + ", " + fmt(fg2.s);
    return o;
}

// ------------------------------------------------------------ criterion 7

Outcome disciplines() {
    Outcome o;
    const Rational q(2);
    GrowthOptions opt;
    opt.lo = 5;
    opt.hi = 40;
    opt.step = 5;
    opt.threshold = kDriftThreshold;
    std::string detail;
    for (int alpha : {1, 2}) {
        ExampleParams prm;
        prm.nx = prm.ne = 40;
        prm.alpha = alpha;
        const auto t = solve_x_major(example_spec("dq-p0", q, prm), 40, 40).table;
        const GrowthReport g = verify_theorem_bounds(t, 0, alpha, 2.0, opt);
        const auto& st = g.disciplines.front().stabilization;
        o.pass = o.pass && st.stable;
        detail += "p=0 alpha=" + std::to_string(alpha) + ": A=" + fmt(g.disciplines.front().constants.A) +
                  " drift " + fmt(st.max_drift) + "; ";
    }
    {
        ExampleParams prm;
        prm.nx = prm.ne = 40;
        const auto t = solve_e_major(example_spec("dq-pminus1", q, prm), 40, 40).table;
        const GrowthReport g = verify_theorem_bounds(t, -1, 1, 2.0, opt);
        const auto& st = g.disciplines.front().stabilization;
        o.pass = o.pass && st.stable;
        detail += "p=-1: A=" + fmt(g.disciplines.front().constants.A) + " drift " + fmt(st.max_drift);
    }
    o.detail = detail;
    return o;
}

// ------------------------------------------------------------ criterion 8

Outcome confluence() {
    Outcome o;
    const Rational q(1000001, 1000000);
    double bracket = 0;
    for (int n = 1; n <= 20; ++n) bracket = std::max(bracket, std::abs(Rational(q_bracket(n, q) - n).get_d()) / n);
    ExampleParams prm;
    prm.nx = prm.ne = 40;
    const auto t = solve_x_major(example_spec("dq-p1-pm", q, prm), 8, 8).table;
    double diag = 0;
    double fact = 1;
    for (int n = 1; n <= 8; ++n) {
        if (n > 1) fact *= n - 1;
        diag = std::max(diag, std::abs(t.at(n, n).get_d() - fact) / fact);
    }
    GrowthOptions opt;
    opt.lo = 10;
    opt.threshold = kDriftThreshold;
    auto family = [&](const Rational& qq) { return example_spec("dq-p1-pm", qq, prm); };
    const ConfluenceReport cr = confluence_study(family, {q}, 8, 8, opt, 20, 40);
    const auto& v = cr.limit_discipline;
    o.pass = bracket < kBracketTol && diag < kDiagonalTol && v.consistent;
    o.detail = "max |[n]_q - n|/n = " + fmt(bracket) + ", max a[n][n] rel. error = " + fmt(diag) + ", limit " + v.space +
               " A=" + fmt(v.constants.A) + " drift " + fmt(v.stabilization.max_drift);
    return o;
}

// ------------------------------------------------------------ criterion 9

std::string exact_digest() {
    std::string d;
    const Rational q32(3, 2);
    for (int alpha : {1, 2}) {
        ExampleParams prm;
        prm.nx = prm.ne = 15;
        prm.alpha = alpha;
        const auto s = example_spec("heine", q32, prm);
        d += table_to_csv(solve_x_major(s, 15, 15).table);
        d += table_to_csv(solve_e_major(s, 15, 15).table);
    }
    ExampleParams prm;
    prm.nx = 25;
    prm.ne = 12;
    d += table_to_csv(solve_x_major(example_spec("sigma-x2", Rational(2), prm), 25, 12).table);
    prm.nx = prm.ne = 12;
    d += table_to_csv(solve_e_major(example_spec("dq-p1-pm", Rational(2), prm), 12, 12).table);
    prm.nx = prm.ne = 10;
    d += table_to_csv(solve_e_major(example_spec("dq-pminus1", Rational(2), prm), 10, 10).table);
    for (const auto& s : random_specs()) {
        d += table_to_csv(solve_x_major(s, 12, 12).table);
        d += table_to_csv(solve_e_major(s, 12, 12).table);
    }
    for (const auto& p : pm_ladder(6)) d += p.to_string() + "\n";
    return d;
}

std::string run_child_digest(const std::string& threads) {
    const std::string self = std::filesystem::read_symlink("/proc/self/exe").string();
    const std::string cmd = "QFLOW_THREADS=" + threads + " '" + self + "' --digest";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return "<popen failed>";
    std::string out;
    char buf[4096];
    size_t k;
    while ((k = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, k);
    const int st = pclose(pipe);
    return st == 0 ? out : "<child failed>";
}

Outcome determinism() {
    Outcome o;
    setenv("QFLOW_THREADS", "1", 1);
    const std::string a = exact_digest();
    setenv("QFLOW_THREADS", "4", 1);
    const std::string b = exact_digest();
    const std::string c = run_child_digest("1");
    const std::string d = run_child_digest("4");
    unsetenv("QFLOW_THREADS");
    o.pass = a == b && a == c && a == d;
    o.detail = std::to_string(a.size()) + " bytes of exact output; in-process 1 vs 4 threads " + (a == b ? "equal" : "DIFFER") +
               ", separate invocations " + (a == c && a == d ? "equal" : "DIFFER");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1 && std::string(argv[1]) == "--digest") {
        std::cout << exact_digest();
        return 0;
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"P_m ladder golden test", pm_golden},
        {"Heine reproduction", heine},
        {"optimality diagonals", diagonals},
        {"cross-path equivalence", cross_path},
        {"norm inequality suite", norm_suite},
        {"growth fits", growth_fits},
        {"theorem-discipline stabilization", disciplines},
        {"confluence", confluence},
        {"determinism", determinism},
    };
    int passed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        passed += o.pass ? 1 : 0;
        std::cout << (o.pass ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first << ": " << o.detail << std::endl;
    }
    std::cout << passed << "/" << criteria.size() << " criteria passed" << std::endl;
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
