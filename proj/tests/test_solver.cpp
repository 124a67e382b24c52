#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qflow/certificate.hpp"
#include "qflow/examples.hpp"
#include "qflow/solver.hpp"

using namespace qflow;

namespace {

// eps x^2 d_q y = y - x: the eps = -1 ray carries (-1)^n [n]!_q at x^{n+1}.
EquationSpec<Rational> euler_spec(const Rational& q, int Nx) {
    EquationSpec<Rational> s;
    s.op = Operator::DQ;
    s.p = 1;
    s.q = q;
    s.F.b = Series2<Rational>(Nx, 0);
    s.F.b.at(1, 0) = -1;
    s.F.A = Series2<Rational>(0, 0);
    s.F.A.at(0, 0) = 1;
    return s;
}

// y + y^2 - eps, zero operator part in x: the n = 0 row solves y + y^2 = eps.
EquationSpec<Rational> quadratic_spec(Operator op, int p) {
    EquationSpec<Rational> s;
    s.op = op;
    s.p = p;
    s.q = Rational(3, 2);
    s.F.b = Series2<Rational>(0, 1);
    s.F.b.at(0, 1) = -1;
    s.F.A = Series2<Rational>(0, 0);
    s.F.A.at(0, 0) = 1;
    NonlinearTerm<Rational> t;
    t.I = {2};
    t.coeff = Series2<Rational>(0, 0);
    t.coeff.at(0, 0) = 1;
    s.F.nonlinear.push_back(t);
    return s;
}

bool has_issue(const EquationSpec<Rational>& s, const std::string& msg) {
    for (const auto& i : validate_spec(s))
        if (i.message == msg) return true;
    return false;
}

}  // namespace

TEST_CASE("euler equation both paths") {
    auto s = euler_spec(Rational(2), 8);
    auto x = solve_x_major(s, 8, 8);
    auto e = solve_e_major(s, 8, 8);
    CHECK(x.table == e.table);
    // a[n+1][n] = [n]!_q, a[n][m] = 0 unless n = m + 1.
    for (int n = 0; n + 1 <= 8; ++n) CHECK(x.table.at(n + 1, n) == q_factorial(n, Rational(2)));
    CHECK(x.table.at(3, 1) == 0);
}

TEST_CASE("validation names the broken hypothesis") {
    auto s = euler_spec(Rational(2), 2);
    CHECK(validate_spec(s).empty());

    auto bad = s;
    bad.p = -1;
    bad.op = Operator::SIGMAQ;
    CHECK(has_issue(bad, "p=-1 requires d_q operator"));

    bad = s;
    bad.F.A.at(0, 0) = 0;
    CHECK(has_issue(bad, "DF_y(0,0,0) not invertible"));

    bad = s;
    bad.q = Rational(1, 2);
    CHECK(has_issue(bad, "|q| > 1 required"));
    bad.q = Rational(-1);
    CHECK(has_issue(bad, "|q| > 1 required"));

    auto nl = quadratic_spec(Operator::DQ, 1);
    nl.F.b = Series2<Rational>(0, 0);
    nl.F.b.at(0, 0) = 1;
    CHECK(has_issue(nl, "F(0,0,0) must vanish when F has nonlinear terms"));

    CHECK_THROWS_AS(solve_x_major(bad, 3, 3), SpecError);
    try {
        solve_e_major(bad, 3, 3);
    } catch (const SpecError& e) {
        CHECK(std::string(e.what()).find("|q| > 1 required") != std::string::npos);
    }
}

TEST_CASE("implicit initial slice matches the inverse series") {
    // y + y^2 = eps: y = eps - eps^2 + 2 eps^3 - 5 eps^4 + 14 eps^5.
    const Rational want[] = {0, 1, -1, 2, -5, 14};
    for (Operator op : {Operator::DQ, Operator::SIGMAQ}) {
        auto s = quadratic_spec(op, 1);
        auto x = solve_x_major(s, 3, 5);
        auto e = solve_e_major(s, 3, 5);
        for (int m = 0; m <= 5; ++m) {
            CHECK(x.y0.at(m) == want[m]);
            CHECK(e.table.at(0, m) == want[m]);
        }
        CHECK(x.table == e.table);
        CHECK(x.diagnostics.newton_iterations >= 1);
    }
}

TEST_CASE("rank reduction leaves alpha = 1 problems unchanged and folds back") {
    auto s = euler_spec(Rational(2), 4);
    auto r = rank_reduce(s);
    CHECK(r.N == 1);
    CHECK(r.F.b == s.F.b);
    ExampleParams prm;
    prm.nx = 6;
    prm.ne = 9;
    prm.alpha = 3;
    auto h = example_spec("heine", Rational(3, 2), prm);
    auto red = rank_reduce(h);
    CHECK(red.N == 3);
    CHECK(red.alpha == 1);
    auto direct = solve_x_major(h, 6, 9);
    CHECK(direct.table == example_oracle("heine", Rational(3, 2), prm));
    CHECK(direct.diagnostics.reduced_dim == 3);
}

TEST_CASE("larger windows crop to smaller ones") {
    ExampleParams prm;
    prm.nx = 10;
    prm.ne = 10;
    for (const char* id : {"dq-p0", "model-M", "dq-p1-pm"}) {
        auto s = example_spec(id, Rational(3, 2), prm);
        auto big = solve_x_major(s, 10, 10);
        auto small = solve_e_major(s, 6, 7);
        CHECK(crop(big.table, 6, 7) == small.table);
    }
}

TEST_CASE("coefficients depend only on data inside the window") {
    auto s = quadratic_spec(Operator::DQ, 1);
    s.F.b = resize(s.F.b, 8, 8);
    auto base = solve_x_major(s, 5, 5);
    auto t = s;
    t.F.b.at(6, 2) = 7;
    t.F.b.at(2, 6) = -3;
    CHECK(solve_x_major(t, 5, 5).table == base.table);
    CHECK(solve_e_major(t, 5, 5).table == base.table);
    t.F.b.at(5, 5) = 1;
    CHECK_FALSE(solve_x_major(t, 5, 5).table == base.table);
}

TEST_CASE("random exact problems agree across the two recurrences") {
    std::mt19937_64 rng(20240611);
    RandomSpecPlan plan;
    for (int k = 0; k < 10; ++k) {
        auto s = random_spec(rng, plan);
        auto cc = cross_check(s, 8, 8);
        CHECK_MESSAGE(cc.agree, "sample " << k << " first (" << cc.first_n << "," << cc.first_m << ")");
    }
}

TEST_CASE("both recurrences solve the equation, including p = -1 and alpha > 1") {
    std::mt19937_64 rng(99);
    RandomSpecPlan plan;
    plan.p_values = {-1, 0, 1, 2};
    plan.alpha_values = {1, 2};
    for (int k = 0; k < 12; ++k) {
        auto s = random_spec(rng, plan);
        auto e = solve_e_major(s, 7, 6);
        CHECK_MESSAGE(equation_residual(s, e.table).is_zero(), "e-major sample " << k);
        if (s.p >= 0) {
            auto x = solve_x_major(s, 7, 6);
            CHECK_MESSAGE(equation_residual(s, x.table).is_zero(), "x-major sample " << k);
            CHECK(x.table == e.table);
        }
    }
}

TEST_CASE("floating solves agree with exact ones") {
    std::mt19937_64 rng(7);
    RandomSpecPlan plan;
    for (int k = 0; k < 4; ++k) {
        auto s = random_spec(rng, plan);
        auto f = convert_spec<Complex>(s, Complex(1.5, 0.0), [](const Rational& v) { return Complex(v.get_d(), 0.0); });
        auto exact = solve_x_major(s, 8, 8);
        auto approx = solve_e_major(f, 8, 8);
        auto conv = map_ring<Complex>(exact.table, [](const Rational& v) { return Complex(v.get_d(), 0.0); });
        CHECK(compare_tables(conv, approx.table, 1e-9).agree);
    }
}

TEST_CASE("majorant certificate on problems with known growth") {
    {
        // eps x d_q y = y - x: p = 0, unit weight.
        EquationSpec<Complex> s;
        s.op = Operator::DQ;
        s.p = 0;
        s.q = Complex(2.0, 0.0);
        s.F.b = Series2<Complex>(1, 0);
        s.F.b.at(1, 0) = Complex(-1.0, 0.0);
        s.F.A = Series2<Complex>(0, 0);
        s.F.A.at(0, 0) = Complex(1.0, 0.0);
        auto c = majorant_certificate(s, 10, 10);
        CHECK(c.weight == std::string("one"));
        CHECK(c.valid);
    }
    {
        ExampleParams prm;
        prm.nx = 12;
        prm.ne = 12;
        auto s = example_spec("dq-p1-pm", Complex(2.0, 0.0), prm);
        CertificateOptions opt;
        opt.r = 0.25;
        auto c = majorant_certificate(s, 12, 12, opt);
        CHECK(c.path == std::string("x-major"));
        CHECK(c.valid);
        CHECK(c.w.size() == c.z.size());
    }
    {
        ExampleParams prm;
        prm.nx = 8;
        prm.ne = 8;
        auto s = example_spec("dq-pminus1", Complex(2.0, 0.0), prm);
        auto c = majorant_certificate(s, 8, 8);
        CHECK(c.path == std::string("e-major"));
        CHECK(c.valid);
    }
}
