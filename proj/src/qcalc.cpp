#include "qflow/qcalc.hpp"

#include <cmath>

namespace qflow {

std::string to_string(const AnyScalar& v) {
    return std::visit([](const auto& x) { return ring_traits<std::decay_t<decltype(x)>>::to_string(x); }, v);
}

QPoly q_binomial(int n, int j) {
    if (n < 0 || j < 0 || j > n) throw DomainError("q_binomial needs 0 <= j <= n");
    std::vector<QPoly> row(static_cast<size_t>(j) + 1);
    row[0] = QPoly(1L);
    for (int i = 1; i <= n; ++i) {
        for (int k = std::min(i, j); k >= 1; --k) {
            QPoly shifted = row[static_cast<size_t>(k)] * QPoly::monomial(Rational(1), k);
            row[static_cast<size_t>(k)] = row[static_cast<size_t>(k - 1)] + shifted;
        }
    }
    return row[static_cast<size_t>(j)];
}

InfiniteProduct q_pochhammer_inf(ComplexLD a, ComplexLD q, long double tol) {
    if (!(std::abs(q) > 1.0L)) throw DomainError("q_pochhammer_inf needs |q| > 1");
    if (!(tol > 0)) throw DomainError("q_pochhammer_inf needs tol > 0");
    const long double amod = std::abs(a);
    if (amod == 0.0L) return {ComplexLD(1.0L, 0.0L), 0};
    const long double qmod = std::abs(q);
    int J = 0;
    for (long double bound = amod; bound >= tol; bound /= qmod) ++J;
    ComplexLD acc(1.0L, 0.0L);
    ComplexLD term = a;
    const ComplexLD qinv = 1.0L / q;
    for (int j = 0; j <= J; ++j) {
        acc *= (1.0L - term);
        term *= qinv;
    }
    return {acc, J};
}

long double bracket_abs(int n, long double qabs) {
    long double acc = 0;
    long double pw = 1;
    for (int k = 0; k < n; ++k) {
        acc += pw;
        pw *= qabs;
    }
    return acc;
}

long double log_bracket_abs(int n, long double qabs) {
    if (n <= 0) return -std::numeric_limits<long double>::infinity();
    if (qabs == 1.0L) return std::log(static_cast<long double>(n));
    // log((|q|^n - 1)/(|q| - 1)) without forming |q|^n.
    const long double l = std::log(qabs);
    if (qabs > 1.0L) return n * l + std::log(-std::expm1(-n * l)) - std::log(qabs - 1.0L);
    return std::log(-std::expm1(n * l)) - std::log1p(-qabs);
}

long double log_qfactorial_abs(int n, long double qabs) {
    long double acc = 0;
    for (int k = 1; k <= n; ++k) acc += log_bracket_abs(k, qabs);
    return acc;
}

long double log_factorial(int n) { return std::lgamma(static_cast<long double>(n) + 1.0L); }

AnyScalar q_bracket(int n, const QValue& q) {
    return visit_ring(q, [n](const auto& qr) -> AnyScalar { return q_bracket(n, qr); });
}

AnyScalar q_factorial(int n, const QValue& q) {
    return visit_ring(q, [n](const auto& qr) -> AnyScalar { return q_factorial(n, qr); });
}

}  // namespace qflow
