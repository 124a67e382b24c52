#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <random>

#include "qflow/series.hpp"

using namespace qflow;

namespace {

Series2<Rational> random_table(std::mt19937_64& rng, int nx, int ne, int rows = 1, int cols = 1) {
    std::uniform_int_distribution<int> d(-4, 4);
    Series2<Rational> f(nx, ne, rows, cols);
    for (auto& v : const_cast<std::vector<Rational>&>(f.data())) v = d(rng);
    return f;
}

// Reference product with plain loops on scalar tables.
Series2<Rational> naive_mul(const Series2<Rational>& f, const Series2<Rational>& g) {
    Series2<Rational> h(f.nx(), f.ne());
    for (int n = 0; n <= f.nx(); ++n)
        for (int m = 0; m <= f.ne(); ++m)
            for (int i = 0; i <= n; ++i)
                for (int j = 0; j <= m; ++j) h.at(n, m) += f.at(i, j) * g.at(n - i, m - j);
    return h;
}

}  // namespace

TEST_CASE("one-variable series arithmetic") {
    Series1<Rational> f(5);
    f.at(0) = 1;
    f.at(1) = -1;  // 1 - t
    auto g = invert_unit(f);
    for (int k = 0; k <= 5; ++k) CHECK(g.at(k) == 1);
    CHECK(mul(f, g).at(0) == 1);
    for (int k = 1; k <= 5; ++k) CHECK(mul(f, g).at(k) == 0);
    auto s = shift(g, 2);
    CHECK(s.at(0) == 0);
    CHECK(s.at(2) == 1);
    CHECK(s.valuation() == 2);
    auto d = apply_dq(g, Rational(2));
    for (int k = 0; k < 5; ++k) CHECK(d.at(k) == (1 << (k + 1)) - 1);
    auto sg = apply_sigmaq(g, Rational(3));
    CHECK(sg.at(3) == 27);
    Series1<Rational> z(3);
    CHECK_THROWS_AS(invert_unit(z), NotAUnit);
}

TEST_CASE("matrix series inverse") {
    Series1<Rational> m(4, 2, 2);
    m.at(0, 0, 0) = 1;
    m.at(0, 1, 1) = 2;
    m.at(1, 0, 1) = 3;
    m.at(2, 1, 0) = -1;
    auto inv = invert_unit(m);
    auto prod = mul(m, inv);
    for (int k = 0; k <= 4; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(prod.at(k, i, j) == (k == 0 && i == j ? 1 : 0));
}

TEST_CASE("two-variable product against the naive convolution") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 5; ++t) {
        auto f = random_table(rng, 7, 6);
        auto g = random_table(rng, 7, 6);
        CHECK(mul(f, g) == naive_mul(f, g));
        CHECK(mul(f, g) == mul(g, f));
        auto h = random_table(rng, 7, 6);
        CHECK(mul(mul(f, g), h) == mul(f, mul(g, h)));
        CHECK(mul(f, add(g, h)) == add(mul(f, g), mul(f, h)));
    }
}

TEST_CASE("two-variable inverse and operators") {
    std::mt19937_64 rng(5);
    auto f = random_table(rng, 6, 6);
    f.at(0, 0) = 2;
    auto g = invert_unit(f);
    auto one = mul(f, g);
    for (int n = 0; n <= 6; ++n)
        for (int m = 0; m <= 6; ++m) CHECK(one.at(n, m) == (n == 0 && m == 0 ? 1 : 0));
    // d_q(x^n) = [n]_q x^{n-1}; sigma_q(x^n) = q^n x^n.
    Series2<Rational> x3(4, 1);
    x3.at(3, 1) = 1;
    CHECK(dq_x(x3, Rational(2)).at(2, 1) == 7);
    CHECK(sigmaq_x(x3, Rational(2)).at(3, 1) == 8);
    // q-Leibniz: d_q(fg) = d_q f * g + sigma_q f * d_q g.
    auto a = random_table(rng, 6, 3);
    auto b = random_table(rng, 6, 3);
    const Rational q(3, 2);
    auto lhs = dq_x(mul(a, b), q);
    auto rhs = add(mul(dq_x(a, q), crop(b, 5, 3)), mul(crop(sigmaq_x(a, q), 5, 3), dq_x(b, q)));
    CHECK(lhs == rhs);
}

TEST_CASE("slices round trip") {
    std::mt19937_64 rng(11);
    auto f = random_table(rng, 5, 4, 2, 1);
    std::vector<Series1<Rational>> rows, cols;
    for (int n = 0; n <= 5; ++n) rows.push_back(slice_x_major(f, n));
    for (int m = 0; m <= 4; ++m) cols.push_back(slice_e_major(f, m));
    CHECK(from_x_slices(rows, 4) == f);
    CHECK(from_e_slices(cols, 5) == f);
    CHECK(component(f, 1).at(3, 2) == f.at(3, 2, 1));
    CHECK_THROWS_AS(add(f, random_table(rng, 5, 4)), DimensionError);
}

TEST_CASE("products do not depend on the worker count") {
    std::mt19937_64 rng(17);
    auto f = random_table(rng, 40, 40);
    auto g = random_table(rng, 40, 40);
    setenv("QFLOW_THREADS", "1", 1);
    auto one = mul(f, g);
    setenv("QFLOW_THREADS", "4", 1);
    auto four = mul(f, g);
    unsetenv("QFLOW_THREADS");
    CHECK(one == four);
}
