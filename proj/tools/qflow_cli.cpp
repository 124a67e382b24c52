// qflow: batch front end for the solver, the example registry, the norm
// checks and the growth analytics.
//
// Exit codes: 0 success, 2 validation failure (bad flags, schema, spec
// hypotheses), 3 oracle mismatch or inequality violation, 1 anything else.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "qflow/certificate.hpp"
#include "qflow/examples.hpp"
#include "qflow/growth.hpp"
#include "qflow/io.hpp"
#include "qflow/nagumo.hpp"
#include "qflow/solver.hpp"

using namespace qflow;

namespace {

constexpr int kOk = 0;
constexpr int kOther = 1;
constexpr int kInvalid = 2;
constexpr int kMismatch = 3;

/// Flag misuse detected after parsing.
struct UsageError : Error {
    using Error::Error;
};

void emit(const Json& j, const std::string& out) {
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_atomic(out, j);
}

std::string q_text(const QValue& q) { return q.to_string(); }

template <class R>
constexpr const char* ring_label() {
    if constexpr (std::is_same_v<R, Rational>) return "rational";
    else if constexpr (std::is_same_v<R, Gaussian>) return "gaussian";
    else if constexpr (std::is_same_v<R, Complex>) return "float";
    else return "symbolic";
}

/// Runs f with q in the ring chosen by the q mode and the --ring flag.
template <class F>
int with_ring(const QValue& q, const std::string& ring, F&& f) {
    if (ring == "float") {
        if (q.is_symbolic()) throw UsageError("--ring float needs a numeric q");
        return f(q.to_complex());
    }
    if (ring == "exact" && q.mode() == QMode::Approximate) throw UsageError("--ring exact needs an exact or symbolic q");
    return visit_ring(q, std::forward<F>(f));
}

int parse_window(const std::vector<int>& w, int& nx, int& ne) {
    if (w.empty()) return 0;
    if (w.size() != 2 || w[0] < 0 || w[1] < 0) throw UsageError("--window expects NX,NE with NX, NE >= 0");
    nx = w[0];
    ne = w[1];
    return 0;
}

// ------------------------------------------------------------------ solve

struct SolveArgs {
    std::string spec;
    std::string out;
    std::vector<int> window;
    std::string ring = "auto";
    std::string path = "auto";
    bool both = false;
    bool timing = false;
    bool certificate = false;
};

template <class R>
int solve_in(const SpecDocument& doc, const R& q, const SolveArgs& a, int nx, int ne) {
    const EquationSpec<R> spec = build_spec<R>(doc, q);
    require_valid(spec);
    const bool x_major = a.path == "x-major" || (a.path == "auto" && spec.p >= 0);
    SolveResult<R> res = x_major ? solve_x_major(spec, nx, ne) : solve_e_major(spec, nx, ne);

    namespace fs = std::filesystem;
    const fs::path dir(a.out);
    write_text_atomic((dir / "table.csv").string(), table_to_csv(res.table));

    Json diag;
    diag["operator"] = operator_name(spec.op);
    diag["p"] = spec.p;
    diag["alpha"] = spec.alpha;
    diag["N"] = spec.N;
    diag["q"] = q_text(doc.q);
    diag["ring"] = ring_label<R>();
    diag["solve"] = to_json(res.diagnostics, a.timing);
    const Series2<R> resid = equation_residual(spec, res.table);
    if constexpr (ring_traits<R>::exact)
        diag["residual_zero"] = resid.is_zero();
    else
        diag["residual_max"] = static_cast<double>(detail::max_magnitude(resid));
    int code = kOk;
    if (a.both) {
        const SolveResult<R> other = x_major ? solve_e_major(spec, nx, ne) : solve_x_major(spec, nx, ne);
        const CrossCheck cc = compare_tables(res.table, other.table);
        write_json_atomic((dir / "cross_check.json").string(), to_json(cc));
        diag["cross_check_agree"] = cc.agree;
        if (!cc.agree) code = kMismatch;
    }
    if (a.certificate) {
        if constexpr (ring_traits<R>::numeric) {
            write_json_atomic((dir / "certificate.json").string(), to_json(majorant_certificate(spec, nx, ne)));
        } else {
            throw UsageError("--certificate needs a numeric q");
        }
    }
    write_json_atomic((dir / "diagnostics.json").string(), diag);
    std::cerr << "solve: " << res.table.nx() << "x" << res.table.ne() << " table written to " << a.out << "\n";
    return code;
}

int run_solve(const SolveArgs& a) {
    const SpecDocument doc = load_spec_document(a.spec);
    int nx = doc.nx;
    int ne = doc.ne;
    parse_window(a.window, nx, ne);
    if (doc.has_float && a.ring == "exact") throw SchemaError("F", "float coefficients need --ring float");
    const std::string ring = a.ring == "auto" && doc.has_float ? "float" : a.ring;
    return with_ring(doc.q, ring, [&](const auto& q) { return solve_in(doc, q, a, nx, ne); });
}

// -------------------------------------------------------------- reproduce

struct ReproduceArgs {
    std::string id;
    int max_order = -1;
    std::vector<int> window;
    std::string q;
    int alpha = 1;
    int p = 1;
    std::string path = "both";
    std::string out;
};

Json row_json(const PmLadderRow& r) {
    return {{"m", r.m},           {"x_degree", r.x_degree},   {"q_degree", r.q_degree},
            {"terms", r.terms},   {"leading_x", r.leading.first}, {"leading_q", r.leading.second},
            {"degrees_ok", r.degrees_ok}, {"printed", r.printed}, {"solver", r.solver}};
}

template <class R>
int reproduce_in(const ExampleInfo& info, const R& q, const ReproduceArgs& a, const ExampleParams& prm, Json& rep) {
    const EquationSpec<R> spec = example_spec(info.id, q, prm);
    const Series2<R> oracle = example_oracle(info.id, q, prm);
    bool pass = true;
    Json paths = Json::array();
    for (const char* path : {"x-major", "e-major"}) {
        if (a.path != "both" && a.path != path) continue;
        const bool x = std::string(path) == "x-major";
        if (x && spec.p == -1 && a.path == "both") continue;  // only the eps-major recurrence handles p = -1
        const SolveResult<R> res = x ? solve_x_major(spec, prm.nx, prm.ne) : solve_e_major(spec, prm.nx, prm.ne);
        const CrossCheck cc = compare_tables(res.table, oracle, 1e-9);
        Json j = to_json(cc);
        j["path"] = path;
        paths.push_back(j);
        pass = pass && cc.agree;
        std::cerr << (cc.agree ? "PASS " : "FAIL ") << info.id << " " << path;
        if (!cc.agree) std::cerr << " first mismatch at n=" << cc.first_n << " m=" << cc.first_m;
        std::cerr << "\n";
    }
    rep["paths"] = paths;
    rep["ring"] = ring_label<R>();

    if constexpr (std::is_same_v<R, Complex>) {
        // Near q = 1 the Heine table approaches the coefficients of (1 - x - eps^alpha)^{-1}.
        if (info.id == "heine" && std::abs(q) - 1.0 < 1e-3) {
            double dev = 0;
            for (int n = 0; n <= prm.nx; ++n)
                for (int m = 0; prm.alpha * m <= prm.ne; ++m) {
                    const double b = q_binomial_at(n + m, m, Rational(1)).get_d();
                    dev = std::max(dev, std::abs(oracle.at(n, prm.alpha * m) - b) / b);
                }
            rep["classical_limit_max_rel_dev"] = dev;
        }
    }
    if constexpr (std::is_same_v<R, QPoly>) {
        if (info.id == "dq-p1-pm") {
            const int solver_m = std::min(prm.ne, 4);
            const PmLadderCheck pm = check_pm_ladder(std::max(8, a.max_order), solver_m, prm.nx);
            Json rows = Json::array();
            for (const auto& r : pm.rows) rows.push_back(row_json(r));
            const auto& p6 = pm.rows[5];
            const bool p6_ok = p6.terms == 203 && p6.leading == std::pair<int, int>{14, 30};
            rep["pm_ladder"] = {{"ok", pm.ok}, {"p6_terms_and_leading_ok", p6_ok}, {"rows", rows}};
            std::cerr << (pm.ok && p6_ok ? "PASS " : "FAIL ") << "P_m ladder\n";
            pass = pass && pm.ok && p6_ok;
        }
    }
    rep["pass"] = pass;
    return pass ? kOk : kMismatch;
}

int run_reproduce(const ReproduceArgs& a) {
    const ExampleInfo& info = find_example(a.id);
    ExampleParams prm;
    prm.nx = info.default_nx;
    prm.ne = info.default_ne;
    if (a.max_order >= 0) prm.nx = prm.ne = a.max_order;
    parse_window(a.window, prm.nx, prm.ne);
    prm.alpha = a.alpha;
    prm.p = a.p;
    if (prm.alpha < 1) throw UsageError("--alpha must be >= 1");
    if (info.id == "sigma-shift" && prm.p < 1) throw UsageError("sigma-shift needs --p >= 1");
    const QValue q = QValue::parse(a.q.empty() ? info.default_q : a.q);
    Json rep;
    rep["example"] = info.id;
    rep["equation"] = info.equation;
    rep["closed_form"] = info.closed_form;
    rep["q"] = q_text(q);
    rep["nx"] = prm.nx;
    rep["ne"] = prm.ne;
    if (info.uses_alpha) rep["alpha"] = prm.alpha;
    if (info.id == "sigma-shift") rep["p"] = prm.p;
    const int code = visit_ring(q, [&](const auto& qr) { return reproduce_in(info, qr, a, prm, rep); });
    emit(rep, a.out);
    return code;
}

// -------------------------------------------------------------- pm-ladder

struct LadderArgs {
    int m_max = 5;
    int solver_m = 4;
    int nx = 14;
    std::string out;
};

int run_pm_ladder(const LadderArgs& a) {
    if (a.m_max < 2) throw UsageError("--m-max must be >= 2");
    const PmLadderCheck pm = check_pm_ladder(a.m_max, a.solver_m, a.nx);
    Json polys = Json::array();
    for (size_t i = 0; i < pm.ladder.size(); ++i) {
        Json j = row_json(pm.rows[i]);
        j["P"] = pm.ladder[i].to_string();
        polys.push_back(j);
    }
    emit({{"m_max", a.m_max}, {"ok", pm.ok}, {"ladder", polys}}, a.out);
    for (const auto& r : pm.rows)
        std::cerr << "P_" << r.m << ": " << r.terms << " terms, leading x^" << r.leading.first << " q^" << r.leading.second
                  << (r.printed == 1 ? ", printed form matches" : r.printed == 0 ? ", PRINTED FORM MISMATCH" : "")
                  << (r.solver == 0 ? ", SOLVER MISMATCH" : "") << (r.degrees_ok ? "" : ", DEGREE MISMATCH") << "\n";
    return pm.ok ? kOk : kMismatch;
}

// ------------------------------------------------------------------ norms

struct NormArgs {
    std::string q = "2";
    double r = 1.0;
    int samples = 500;
    int degrees = 8;
    std::uint64_t seed = 1;
    int n_max = 5;
    int m_max = 5;
    double slack = 1.02;
    int systems = 50;
    std::string out;
};

int run_norms(const NormArgs& a) {
    const QValue qv = QValue::parse(a.q);
    if (qv.is_symbolic()) throw UsageError("--q must be numeric");
    if (a.samples < 0 || a.degrees < 0 || a.n_max < 0 || a.m_max < 0) throw UsageError("counts must be >= 0");
    NagumoContext ctx;
    ctx.r = a.r;
    ctx.q = qv.to_complex();
    NormSamplePlan plan;
    plan.count = a.samples;
    plan.max_degree = a.degrees;
    plan.seed = a.seed;
    plan.n_max = a.n_max;
    plan.m_max = a.m_max;
    plan.slack = a.slack;
    plan.system_count = a.samples == 0 ? 0 : a.systems;
    plan.primed = ctx.real_q();
    Json rep;
    rep["q"] = q_text(qv);
    rep["r"] = a.r;
    rep["samples"] = a.samples;
    rep["seed"] = a.seed;
    rep["slack"] = a.slack;
    int code = kOk;
    if (a.samples > 0) {
        const NormReport nr = check_norm_inequalities(plan, ctx);
        rep["report"] = to_json(nr);
        if (!nr.violations.empty()) code = kMismatch;
        std::cerr << nr.checks << " checks, " << nr.violations.size() << " violations\n";
    } else {
        rep["report"] = nullptr;
    }
    if (ctx.real_q() && ctx.q.real() < 1.01 && a.samples > 0) {
        Json rows = Json::array();
        for (const auto& row : classical_limit_comparison(plan, ctx))
            rows.push_back({{"n", row.n}, {"max_rel_diff", row.max_rel_diff}});
        rep["classical_limit"] = rows;
    }
    emit(rep, a.out);
    return code;
}

// ----------------------------------------------------------------- growth

struct GrowthArgs {
    std::string example;
    std::string table;
    std::string q;
    std::vector<int> window;
    int p = 1;
    int alpha = 1;
    double q_modulus = 0;
    std::vector<std::string> spaces{"auto"};
    GrowthOptions opt;
    std::string out;
};

template <class R>
Json growth_json(const Series2<R>& t, int p, int alpha, double qmod, const GrowthArgs& a) {
    GrowthReport g = verify_theorem_bounds(t, p, alpha, qmod, a.opt);
    for (const auto& s : a.spaces) {
        SpaceSpec sp;
        sp.p = p;
        sp.alpha = alpha;
        sp.q_modulus = qmod;
        if (s == "ring" || (s == "auto" && p <= 0))
            sp.kind = SpaceKind::Ring;
        else if (s == "monomial" || (s == "auto" && p > 0))
            sp.kind = SpaceKind::Monomial;
        else
            throw UsageError("unknown space '" + s + "' (ring, monomial, auto)");
        if (sp.kind == SpaceKind::Monomial && p <= 0) throw UsageError("the monomial space needs p >= 1");
        g.membership.push_back(classify_space(t, sp, a.opt));
    }
    Json j = to_json(g);
    j["p"] = p;
    j["alpha"] = alpha;
    j["q_modulus"] = qmod;
    j["window"] = {t.nx(), t.ne()};
    return j;
}

int run_growth(const GrowthArgs& a) {
    if (a.example.empty() == a.table.empty()) throw UsageError("give exactly one of --example or --table");
    Json rep;
    if (!a.example.empty()) {
        const ExampleInfo& info = find_example(a.example);
        ExampleParams prm;
        prm.nx = info.default_nx;
        prm.ne = info.default_ne;
        parse_window(a.window, prm.nx, prm.ne);
        prm.alpha = a.alpha;
        prm.p = a.p;
        const QValue q = QValue::parse(a.q.empty() ? info.default_q : a.q);
        if (q.is_symbolic()) throw UsageError("growth needs a numeric q");
        rep = visit_ring(q, [&](const auto& qr) -> Json {
            using R = std::decay_t<decltype(qr)>;
            if constexpr (std::is_same_v<R, QPoly>) {
                return nullptr;
            } else {
                const EquationSpec<R> spec = example_spec(info.id, qr, prm);
                const auto res = spec.p >= 0 ? solve_x_major(spec, prm.nx, prm.ne) : solve_e_major(spec, prm.nx, prm.ne);
                return growth_json(res.table, spec.p, spec.alpha, q.modulus(), a);
            }
        });
        rep["example"] = info.id;
        rep["q"] = q_text(q);
    } else {
        if (!(a.q_modulus > 1)) throw UsageError("--table needs --q-modulus > 1");
        const CsvTable t = load_csv_table(a.table);
        switch (t.ring) {
            case TableRing::Rational: rep = growth_json(t.rational, a.p, a.alpha, a.q_modulus, a); break;
            case TableRing::Gaussian: rep = growth_json(t.gaussian, a.p, a.alpha, a.q_modulus, a); break;
            case TableRing::Float: rep = growth_json(t.floating, a.p, a.alpha, a.q_modulus, a); break;
            case TableRing::Symbolic: throw UsageError("growth needs a numeric table");
        }
        rep["table"] = std::filesystem::path(a.table).filename().string();
    }
    emit(rep, a.out);
    return kOk;
}

// ------------------------------------------------------------- confluence

struct ConfluenceArgs {
    std::string example = "dq-p1-pm";
    int k_lo = 4;
    int k_hi = 12;
    std::vector<std::string> q_values;
    std::vector<int> window{8, 8};
    int limit = 40;
    int alpha = 1;
    int bracket_n = 20;
    GrowthOptions opt;
    std::string out;
};

int run_confluence(ConfluenceArgs a) {
    const ExampleInfo& info = find_example(a.example);
    if (info.op != Operator::DQ) throw UsageError("confluence needs a d_q example");
    int nx = 8;
    int ne = 8;
    parse_window(a.window, nx, ne);
    std::vector<Rational> qs;
    if (!a.q_values.empty()) {
        for (const auto& s : a.q_values) {
            const Rational q = parse_rational(s);
            if (!(q > 1)) throw UsageError("confluence q values must exceed 1");
            qs.push_back(q);
        }
    } else {
        if (a.k_lo < 1 || a.k_hi < a.k_lo) throw UsageError("need 1 <= k-lo <= k-hi");
        qs = confluence_q_values(a.k_lo, a.k_hi);
    }
    ExampleParams prm;
    prm.nx = prm.ne = std::max({a.limit, nx, ne});
    prm.alpha = a.alpha;
    auto family = [&](const Rational& q) { return example_spec(info.id, q, prm); };
    const ConfluenceReport cr = confluence_study(family, qs, nx, ne, a.opt, a.bracket_n, a.limit);
    Json rep = to_json(cr);
    rep["example"] = info.id;
    rep["window"] = {nx, ne};
    rep["limit_window"] = std::max({a.limit, nx, ne});
    // Error rate in (q - 1): slope of log error against log(q - 1).
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : cr.rows)
        if (r.max_rel_error > 0) pts.emplace_back(std::log(r.q_value - 1.0), std::log(r.max_rel_error));
    if (pts.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(pts.size());
        rep["error_rate"] = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    } else {
        rep["error_rate"] = nullptr;
    }
    emit(rep, a.out);
    return kOk;
}

void add_growth_options(CLI::App* c, GrowthOptions& o) {
    c->add_option("--r", o.r, "Base radius of the disciplines")->check(CLI::PositiveNumber);
    c->add_option("--circle-samples", o.samples, "Points per circle for sup estimates")->check(CLI::PositiveNumber);
    c->add_option("--lo", o.lo, "First index of the stabilization windows")->check(CLI::NonNegativeNumber);
    c->add_option("--hi", o.hi, "Last index (-1: whole window)");
    c->add_option("--step", o.step, "Window step")->check(CLI::PositiveNumber);
    c->add_option("--threshold", o.threshold, "Drift threshold")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qflow: formal solutions of singularly perturbed q-difference equations"};
    int threads = 0;
    bool list = false;
    app.add_option("--threads", threads, "Worker cap (overrides QFLOW_THREADS)")->check(CLI::NonNegativeNumber);
    app.add_flag("--list-examples", list, "Print the example registry and exit");
    app.require_subcommand(0, 1);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Solve an equation given as a JSON spec document");
    solve->add_option("spec", sa.spec, "Spec document")->required()->check(CLI::ExistingFile);
    solve->add_option("-o,--out", sa.out, "Output directory")->required();
    solve->add_option("--window", sa.window, "Truncation NX,NE (overrides the document)")->delimiter(',')->expected(2);
    solve->add_option("--ring", sa.ring, "exact, float or auto")->check(CLI::IsMember({"exact", "float", "auto"}));
    solve->add_option("--path", sa.path, "x-major, e-major or auto")->check(CLI::IsMember({"x-major", "e-major", "auto"}));
    solve->add_flag("--both-paths", sa.both, "Also run the other recurrence and write cross_check.json");
    solve->add_flag("--certificate", sa.certificate, "Write the majorant certificate (numeric q)");
    solve->add_flag("--timing", sa.timing, "Include wall-clock time in the diagnostics");

    ReproduceArgs ra;
    auto* repro = app.add_subcommand("reproduce", "Solve a registered example and compare with its closed form");
    repro->add_option("id", ra.id, "Example id")->required();
    repro->add_option("--max-order,-M", ra.max_order, "Square window M x M")->check(CLI::NonNegativeNumber);
    repro->add_option("--window", ra.window, "Window NX,NE")->delimiter(',')->expected(2);
    repro->add_option("--q", ra.q, "q: symbolic, a/b, re;im, float:x, polar:r;t or a decimal");
    repro->add_option("--alpha", ra.alpha, "Exponent of eps for examples with a free alpha");
    repro->add_option("--p", ra.p, "Exponent p for sigma-shift");
    repro->add_option("--path", ra.path, "both, x-major or e-major")->check(CLI::IsMember({"both", "x-major", "e-major"}));
    repro->add_option("-o,--out", ra.out, "Report file (default: stdout)");

    LadderArgs la;
    auto* ladder = app.add_subcommand("pm-ladder", "Numerator polynomials P_m of the dq-p1-pm example in Q[x,q]");
    ladder->add_option("--m-max", la.m_max, "Largest m");
    ladder->add_option("--solver-m", la.solver_m, "Cross-check against the solver for m <= this")->check(CLI::NonNegativeNumber);
    ladder->add_option("--nx", la.nx, "x-orders compared in the solver cross-check")->check(CLI::NonNegativeNumber);
    ladder->add_option("-o,--out", la.out, "Report file (default: stdout)");

    NormArgs na;
    auto* norms = app.add_subcommand("norms", "Random-sample check of the q-Nagumo norm inequalities");
    norms->add_option("--q", na.q, "q (numeric)");
    norms->add_option("--r", na.r, "Radius")->check(CLI::PositiveNumber);
    norms->add_option("--samples", na.samples, "Random polynomial pairs");
    norms->add_option("--degrees", na.degrees, "Maximal degree of the samples");
    norms->add_option("--seed", na.seed, "Seed");
    norms->add_option("--n-max", na.n_max, "Largest norm index n");
    norms->add_option("--m-max", na.m_max, "Largest second index m");
    norms->add_option("--slack", na.slack, "Grid slack on the left-hand sides")->check(CLI::PositiveNumber);
    norms->add_option("--systems", na.systems, "Random matrix-vector samples")->check(CLI::NonNegativeNumber);
    norms->add_option("-o,--out", na.out, "Report file (default: stdout)");

    GrowthArgs ga;
    auto* growth = app.add_subcommand("growth", "Growth report of an example or a CSV table");
    growth->add_option("--example", ga.example, "Example id");
    growth->add_option("--table", ga.table, "Coefficient table CSV")->check(CLI::ExistingFile);
    growth->add_option("--q", ga.q, "q for --example");
    growth->add_option("--window", ga.window, "Window NX,NE for --example")->delimiter(',')->expected(2);
    growth->add_option("--p", ga.p, "p (for --table, and sigma-shift)");
    growth->add_option("--alpha", ga.alpha, "alpha")->check(CLI::PositiveNumber);
    growth->add_option("--q-modulus", ga.q_modulus, "|q| for --table");
    growth->add_option("--space", ga.spaces, "ring, monomial or auto (repeatable)");
    add_growth_options(growth, ga.opt);
    growth->add_option("-o,--out", ga.out, "Report file (default: stdout)");

    ConfluenceArgs ca;
    auto* confl = app.add_subcommand("confluence", "Tables at q = 1 + 2^-k against the q = 1 limit");
    confl->add_option("--example", ca.example, "d_q example id");
    confl->add_option("--k-lo", ca.k_lo, "First k");
    confl->add_option("--k-hi", ca.k_hi, "Last k");
    confl->add_option("--q-values", ca.q_values, "Explicit rational q values (replaces the k range)")->delimiter(',');
    confl->add_option("--window", ca.window, "Window NX,NE at each q")->delimiter(',')->expected(2);
    confl->add_option("--limit-window", ca.limit, "Square window of the q = 1 table")->check(CLI::PositiveNumber);
    confl->add_option("--alpha", ca.alpha, "alpha")->check(CLI::PositiveNumber);
    confl->add_option("--bracket-n", ca.bracket_n, "Largest n for the [n]_q comparison")->check(CLI::PositiveNumber);
    ca.opt.lo = 10;
    add_growth_options(confl, ca.opt);
    confl->add_option("-o,--out", ca.out, "Report file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    if (threads > 0) setenv("QFLOW_THREADS", std::to_string(threads).c_str(), 1);
    try {
        if (list) {
            for (const auto& e : example_registry())
                std::cout << e.id << "\t" << e.equation << "\t" << e.closed_form << "\n";
            return kOk;
        }
        if (*solve) return run_solve(sa);
        if (*repro) return run_reproduce(ra);
        if (*ladder) return run_pm_ladder(la);
        if (*norms) return run_norms(na);
        if (*growth) return run_growth(ga);
        if (*confl) return run_confluence(ca);
        std::cerr << app.help();
        return kInvalid;
    } catch (const SpecError& e) {
        std::cerr << "error: the equation violates its hypotheses\n";
        for (const auto& i : e.issues()) std::cerr << "  [" << i.hypothesis << "] " << i.message << "\n";
        return kInvalid;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kInvalid;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kOther;
    }
}
