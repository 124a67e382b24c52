#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include "qflow/nagumo.hpp"

using namespace qflow;

namespace {

NagumoContext ctx_q2() {
    NagumoContext c;
    c.r = 1.0;
    c.q = Complex(2.0, 0.0);
    return c;
}

}  // namespace

TEST_CASE("d_n plateau and boundary") {
    auto c = ctx_q2();
    CHECK(dn_profile(0.0, 3, c) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(dn_profile(1.0 / 8, 3, c) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(dn_profile(0.2, 3, c), DomainError);
    CHECK_THROWS_AS(dn_profile(-0.1, 0, c), DomainError);
}

TEST_CASE("d_n shift law on a radius grid") {
    auto c = ctx_q2();
    for (int n = 0; n <= 6; ++n)
        for (int i = 0; i <= 200; ++i) {
            const double t = (1.0 / std::pow(2.0, n + 1)) * i / 200.0;
            CHECK(std::abs(dn_profile(2.0 * t, n, c) - dn_profile(t, n + 1, c)) <= 1e-14);
        }
}

TEST_CASE("d_n monotone and Lipschitz on grid points") {
    auto c = ctx_q2();
    for (int n = 0; n <= 5; ++n) {
        const double top = 1.0 / std::pow(2.0, n + 1);
        double prev_t = 0, prev_d = dn_profile(0.0, n, c);
        for (int i = 1; i <= 100; ++i) {
            const double t = top * i / 100.0;
            const double dn = dn_profile(t, n, c);
            CHECK(dn_profile(t, n + 1, c) <= dn + 1e-15);
            CHECK(dn <= 0.5 + 1e-15);
            CHECK(std::abs(dn - prev_d) <= std::pow(2.0, n) * (t - prev_t) + 1e-14);
            prev_t = t;
            prev_d = dn;
        }
    }
}

TEST_CASE("norm of order 0 is the sup norm") {
    auto c = ctx_q2();
    CHECK(nagumo_norm({Complex(1, 0), Complex(1, 0)}, 0, c) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("constant function norms") {
    auto c = ctx_q2();
    for (int n = 0; n <= 5; ++n) {
        CHECK(nagumo_norm({Complex(3, 0)}, n, c) == doctest::Approx(3 * std::pow(0.5, n)).epsilon(1e-12));
        CHECK(nagumo_norm_prime({Complex(3, 0)}, n, c) == doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_CASE("f = x at order 1 against the parabola vertex") {
    // t d_1(t) = t (1 - 2t) on [1/4, 1/2], plateau t/2 below: max 1/8 at t = 1/4.
    auto c = ctx_q2();
    CHECK(std::abs(nagumo_norm({Complex(0, 0), Complex(1, 0)}, 1, c) - 0.125) <= 1e-6);
}

TEST_CASE("primed norm tends to the classical weight as q -> 1") {
    NagumoContext c;
    c.r = 1.0;
    c.q = Complex(1.0 + 1e-9, 0.0);
    c.levels = 1;
    c.radial = 4;
    c.uniform = 4096;
    // f = x, n = 2: sup t (1 - t)^2 = 4/27 at t = 1/3.
    const double v = nagumo_norm_prime({Complex(0, 0), Complex(1, 0)}, 2, c);
    CHECK(std::abs(v - 4.0 / 27.0) <= 1e-6);
}

TEST_CASE("norm estimates are monotone under grid refinement") {
    Poly f{Complex(0.3, -0.2), Complex(-1, 0.5), Complex(0.7, 0.1), Complex(0.2, 0.9)};
    auto c = ctx_q2();
    c.radial = 8;
    c.angular = 8;
    c.uniform = 8;
    double prev = 0;
    for (int step = 0; step < 4; ++step) {
        const double v = nagumo_norm(f, 2, c);
        CHECK(v >= prev);
        prev = v;
        c.radial *= 2;
        c.angular *= 2;
        c.uniform *= 2;
    }
}

TEST_CASE("zero pair satisfies everything with equality") {
    auto c = ctx_q2();
    c.radial = 4;
    c.angular = 4;
    c.uniform = 4;
    NormSamplePlan plan;
    plan.count = 3;
    plan.max_degree = 0;
    plan.coefficient_bound = 0;
    plan.system_count = 0;
    auto rep = check_norm_inequalities(plan, c);
    CHECK(rep.violations.empty());
}

TEST_CASE("random inequality run at q = 2") {
    auto c = ctx_q2();
    c.radial = 16;
    c.angular = 32;
    c.uniform = 64;
    NormSamplePlan plan;
    auto t0 = std::chrono::steady_clock::now();
    auto rep = check_norm_inequalities(plan, c);
    MESSAGE("seconds " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                       << " checks " << rep.checks << " worst " << rep.worst_ratio);
    CHECK(rep.violations.empty());
    CHECK(std::abs(rep.tightness_ratio - rep.tightness_expected) <= 1e-12);
}
