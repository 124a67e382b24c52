#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "qflow/examples.hpp"

using namespace qflow;

namespace {

XQPoly from_strings(const std::map<int, std::string>& by_x_degree) {
    XQPoly p;
    p.c.resize(static_cast<size_t>(by_x_degree.rbegin()->first) + 1);
    for (const auto& [k, s] : by_x_degree) p.c[static_cast<size_t>(k)] = QPoly::parse(s);
    return p;
}

template <class R>
void check_example(const std::string& id, const R& q, ExampleParams prm, bool x_path, bool e_path) {
    auto spec = example_spec(id, q, prm);
    auto oracle = example_oracle(id, q, prm);
    if (x_path) {
        auto res = solve_x_major(spec, prm.nx, prm.ne);
        CHECK_MESSAGE(res.table == oracle, id << " x-major");
    }
    if (e_path) {
        auto res = solve_e_major(spec, prm.nx, prm.ne);
        CHECK_MESSAGE(res.table == oracle, id << " e-major");
    }
}

}  // namespace

TEST_CASE("registry lists every example once") {
    CHECK(example_registry().size() == 10);
    CHECK(find_example("heine").op == Operator::SIGMAQ);
    CHECK_THROWS_AS(find_example("nope"), DomainError);
}

TEST_CASE("every oracle matches both recurrences at exact q") {
    const Rational q(3, 2);
    for (const auto& info : example_registry()) {
        ExampleParams prm;
        prm.nx = 9;
        prm.ne = 8;
        const bool x_ok = info.p >= 0;
        check_example(info.id, q, prm, x_ok, true);
        if (info.uses_alpha) {
            prm.alpha = 2;
            check_example(info.id, q, prm, x_ok, true);
        }
    }
}

TEST_CASE("oracles hold for symbolic q") {
    const QPoly q = QPoly::q();
    ExampleParams prm;
    prm.nx = 6;
    prm.ne = 5;
    check_example("dq-p1-pm", q, prm, true, true);
    check_example("heine", q, prm, true, true);
    check_example("dq-pminus1", q, prm, false, true);
    check_example("sigma-shift", q, prm, true, true);
}

TEST_CASE("oracles hold at a Gaussian q") {
    const Gaussian q(Rational(1), Rational(1));
    ExampleParams prm;
    prm.nx = 7;
    prm.ne = 7;
    check_example("euler-q", q, prm, true, true);
    check_example("model-M", q, prm, true, true);
}

TEST_CASE("sigma-shift closed form for p = 2 and p = 3") {
    for (int p : {2, 3}) {
        ExampleParams prm;
        prm.nx = 12;
        prm.ne = 5;
        prm.p = p;
        check_example("sigma-shift", Rational(2), prm, true, true);
    }
}

TEST_CASE("floating q agrees with the exact oracle to rounding") {
    ExampleParams prm;
    prm.nx = 8;
    prm.ne = 8;
    auto spec = example_spec("heine", Complex(1.5, 0.0), prm);
    auto res = solve_x_major(spec, prm.nx, prm.ne);
    auto exact = example_oracle("heine", Rational(3, 2), prm);
    for (int n = 0; n <= 8; ++n)
        for (int m = 0; m <= 8; ++m) {
            const double e = exact.at(n, m).get_d();
            CHECK(std::abs(res.table.at(n, m) - e) <= 1e-12 * std::max(1.0, std::abs(e)));
        }
}

TEST_CASE("P_m ladder matches the printed polynomials") {
    auto P = pm_ladder(8);
    CHECK(P[1] == from_strings({{0, "1"}}));
    CHECK(P[2] == from_strings({{0, "q + 1"}, {1, "q"}, {2, "-q^2"}}));
    XQPoly p4 = from_strings({{5, "q^7"},
                              {4, "-3*q^6 - 2*q^5"},
                              {3, "-4*q^6 - 6*q^5 - 3*q^4 - 2*q^3"},
                              {2, "-q^6 - 2*q^5 - q^4 - q^3"},
                              {1, "q^4 + 3*q^3 + 4*q^2 + 2*q"},
                              {0, "q^3 + 2*q^2 + 2*q + 1"}});
    CHECK(P[3] == p4);
    XQPoly p5 = from_strings(
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
    CHECK(P[4] == p5);
    CHECK(P[5].term_count() == 203);
    CHECK(P[5].leading_exponents() == std::pair<int, int>{14, 30});
    for (int m = 2; m <= 8; ++m) {
        CHECK(P[static_cast<size_t>(m - 1)].x_degree() == m * (m - 1) / 2 - 1);
        CHECK(P[static_cast<size_t>(m - 1)].q_degree() == (m - 1) * (m - 2) * (m + 3) / 6);
    }
}

TEST_CASE("P_m ladder against the eps-major solution of the same equation") {
    // u_m * prod_{j<m} (1 + q^j x)^{m-j} = x^m P_m as truncated x-series.
    const int M = 4;
    const int nx = 14;
    ExampleParams prm;
    prm.nx = nx;
    prm.ne = M;
    auto res = solve_e_major(example_spec("dq-p1-pm", QPoly::q(), prm), nx, M);
    auto P = pm_ladder(M);
    for (int m = 1; m <= M; ++m) {
        XQPoly u;
        for (int n = 0; n <= nx; ++n) u.c.push_back(res.table.at(n, m));
        XQPoly lhs = xq_mul(u, pm_denominator(m));
        const XQPoly& pm = P[static_cast<size_t>(m - 1)];
        for (int n = 0; n <= nx; ++n) {
            const QPoly got = n < static_cast<int>(lhs.c.size()) ? lhs.c[static_cast<size_t>(n)] : QPoly();
            const int k = n - m;
            const QPoly want = (k >= 0 && k < static_cast<int>(pm.c.size())) ? pm.c[static_cast<size_t>(k)] : QPoly();
            CHECK_MESSAGE(got == want, "m=" << m << " n=" << n);
        }
    }
}
