#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qflow/qcalc.hpp"

using namespace qflow;

TEST_CASE("bracket equals the geometric sum in closed form") {
    const Rational q(3, 2);
    for (int n = 0; n <= 12; ++n) {
        Rational closed = (ring_pow(q, n) - 1) / (q - 1);
        CHECK(q_bracket(n, q) == closed);
    }
    CHECK(q_bracket(5, Rational(1)) == 5);
    CHECK(q_bracket(4, QPoly::q()) == QPoly::parse("q^3 + q^2 + q + 1"));
    auto tab = q_bracket_table(6, Rational(2));
    for (int n = 0; n <= 6; ++n) CHECK(tab[static_cast<size_t>(n)] == (1 << n) - 1);
    CHECK_THROWS_AS(q_bracket(-1, Rational(2)), DomainError);
}

TEST_CASE("factorial is the product of brackets and tends to n! at q = 1") {
    CHECK(q_factorial(0, Rational(2)) == 1);
    CHECK(q_factorial(4, Rational(2)) == 1 * 3 * 7 * 15);
    CHECK(q_factorial(6, Rational(1)) == 720);
    CHECK(q_factorial(3, QPoly::q()) == QPoly::parse("q^3 + 2*q^2 + 2*q + 1"));
}

TEST_CASE("Gaussian binomials") {
    CHECK(q_binomial(4, 2) == QPoly::parse("q^4 + q^3 + 2*q^2 + q + 1"));
    for (int n = 0; n <= 9; ++n)
        for (int j = 0; j <= n; ++j) {
            const QPoly c = q_binomial(n, j);
            CHECK(c == q_binomial(n, n - j));
            // Second Pascal rule: C(n,j) = q^{n-j} C(n-1,j-1) + C(n-1,j).
            if (n >= 1 && j >= 1 && j < n)
                CHECK(c == QPoly::monomial(Rational(1), n - j) * q_binomial(n - 1, j - 1) + q_binomial(n - 1, j));
            // Factorial quotient.
            const Rational q(5, 3);
            CHECK(q_binomial_at(n, j, q) == q_factorial(n, q) / (q_factorial(j, q) * q_factorial(n - j, q)));
            CHECK(c.eval(q) == q_binomial_at(n, j, q));
            CHECK(c.eval(Rational(1)) == q_binomial_at(n, j, Rational(1)));
        }
}

TEST_CASE("finite Pochhammer and the q-binomial theorem") {
    // (a;q)_n = sum_j C(n,j)_q q^{j(j-1)/2} (-a)^j
    const Rational q(3, 2);
    const Rational a(-2, 7);
    for (int n = 0; n <= 8; ++n) {
        Rational sum = 0;
        for (int j = 0; j <= n; ++j)
            sum += q_binomial_at(n, j, q) * ring_pow(q, j * (j - 1) / 2) * ring_pow(Rational(-a), j);
        CHECK(q_pochhammer(a, q, n) == sum);
    }
    CHECK(q_pochhammer(Rational(1), q, 3) == 0);
}

TEST_CASE("infinite product against the Euler series") {
    // prod_{j>=0} (1 - a t^j) = sum_k (-1)^k t^{k(k-1)/2} a^k / (t;t)_k, t = 1/q.
    for (ComplexLD q : {ComplexLD(2.0L, 0.0L), ComplexLD(1.3L, 0.4L)}) {
        const ComplexLD a(0.7L, -0.2L);
        auto prod = q_pochhammer_inf(a, q, 1e-18L);
        const ComplexLD t = 1.0L / q;
        ComplexLD sum = 0, tt = 1, term_pow = 1;
        for (int k = 0; k < 200; ++k) {
            if (k > 0) tt *= (1.0L - std::pow(t, k));
            ComplexLD term = (k % 2 ? -1.0L : 1.0L) * std::pow(t, k * (k - 1) / 2.0L) * term_pow / tt;
            sum += term;
            term_pow *= a;
            if (std::abs(term) < 1e-30L) break;
        }
        CHECK(std::abs(prod.value - sum) < 1e-14L);
        CHECK(prod.last_index > 0);
    }
}

TEST_CASE("logarithmic helpers") {
    CHECK(std::abs(static_cast<double>(bracket_abs(5, 2.0L)) - 31.0) < 1e-12);
    CHECK(std::abs(static_cast<double>(log_qfactorial_abs(4, 2.0L)) - std::log(1.0 * 3 * 7 * 15)) < 1e-12);
    CHECK(std::abs(static_cast<double>(log_factorial(10)) - std::log(3628800.0)) < 1e-12);
    // Large orders stay finite.
    CHECK(std::isfinite(static_cast<double>(log_qfactorial_abs(2000, 3.0L))));
    CHECK(std::abs(static_cast<double>(log_bracket_abs(3, 1.0L)) - std::log(3.0)) < 1e-15);
}

TEST_CASE("QPoly arithmetic and division") {
    const QPoly a = QPoly::parse("q^3 - 1");
    const QPoly b = QPoly::parse("q - 1");
    CHECK(a.exact_div(b) == QPoly::parse("q^2 + q + 1"));
    CHECK_THROWS_AS(QPoly::parse("q^3 + 1").exact_div(b), InexactDivision);
    auto [quo, rem] = QPoly::parse("q^3 + 2").divmod(b);
    CHECK(quo * b + rem == QPoly::parse("q^3 + 2"));
    CHECK(rem == QPoly(3L));
    CHECK((a - a).is_zero());
    CHECK(QPoly::parse(a.to_string()) == a);
    CHECK(QPoly::parse("1/2*q^2 - 3/4").coeff(0) == Rational(-3, 4));
}

TEST_CASE("QValue parsing and dispatch") {
    CHECK(QValue::parse("symbolic").is_symbolic());
    CHECK(QValue::parse("3/2").rational() == Rational(3, 2));
    CHECK(QValue::parse("6/4").rational() == Rational(3, 2));
    CHECK(QValue::parse("1;1").is_gaussian());
    CHECK(std::abs(QValue::parse("float:1.5").modulus() - 1.5) < 1e-15);
    CHECK_THROWS(QValue::parse("1/2"));
    CHECK_THROWS(QValue::parse("float:0.5"));
    // 1 + i has |q|^2 = 2 > 1.
    CHECK(QValue::parse("1;1").modulus() > 1.0);
    auto v = q_bracket(3, QValue::parse("2"));
    CHECK(std::get<Rational>(v) == 7);
    auto s = q_bracket(3, QValue::symbolic());
    CHECK(std::get<QPoly>(s) == QPoly::parse("q^2 + q + 1"));
    const QValue polar = QValue::parse("polar:1.2;0.4487989505128276");
    CHECK(std::abs(polar.modulus() - 1.2) < 1e-14);
}

TEST_CASE("exact matrix inverse") {
    Matrix<Rational> m(2);
    m.a = {Rational(2), Rational(1), Rational(1), Rational(1)};
    auto inv = invert(m);
    CHECK(inv.a[0] == 1);
    CHECK(inv.a[1] == -1);
    CHECK(inv.a[2] == -1);
    CHECK(inv.a[3] == 2);
    Matrix<Rational> sing(2);
    sing.a = {Rational(1), Rational(2), Rational(2), Rational(4)};
    CHECK_THROWS_AS(invert(sing), NotAUnit);
}
