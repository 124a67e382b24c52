#include "qflow/ring.hpp"

#include <charconv>
#include <cmath>

namespace qflow {

namespace {

// log2|z| for a nonzero integer, split as mantissa/exponent so huge values
// do not overflow a double.
long double log_abs_z(const mpz_class& z) {
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
    return std::log(std::fabs(static_cast<long double>(mant))) + static_cast<long double>(exp) * std::log(2.0L);
}

}  // namespace

long double rational_log_abs(const Rational& a) {
    if (sgn(a) == 0) return -std::numeric_limits<long double>::infinity();
    return log_abs_z(a.get_num()) - log_abs_z(a.get_den());
}

ComplexLD rational_to_ld(const Rational& a) {
    if (sgn(a) == 0) return {0.0L, 0.0L};
    long en = 0;
    long ed = 0;
    double mn = mpz_get_d_2exp(&en, a.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, a.get_den_mpz_t());
    long double v = std::ldexp(static_cast<long double>(mn) / static_cast<long double>(md), static_cast<int>(en - ed));
    return {v, 0.0L};
}

Rational parse_rational(const std::string& text) {
    Rational r;
    std::string t = text;
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    if (t.empty() || r.set_str(t, 10) != 0) throw DomainError("not a rational: '" + text + "'");
    if (sgn(r.get_den()) == 0) throw DomainError("zero denominator: '" + text + "'");
    r.canonicalize();
    return r;
}

std::string to_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace qflow
