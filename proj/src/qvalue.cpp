#include "qflow/qvalue.hpp"

#include <cmath>
#include <cstdlib>

namespace qflow {

QValue QValue::symbolic() { return QValue(); }

QValue QValue::exact(const Rational& q) {
    if (!(abs(q) > 1)) throw DomainError("|q| > 1 required, got q = " + q.get_str());
    return exact_unchecked(q);
}

QValue QValue::exact_unchecked(const Rational& q) {
    QValue v;
    v.mode_ = QMode::Exact;
    v.point_ = q;
    return v;
}

QValue QValue::exact(const Gaussian& q) {
    if (!(q.norm_sq() > 1))
        throw DomainError("|q|^2 > 1 required, got q = " + ring_traits<Gaussian>::to_string(q));
    QValue v;
    v.mode_ = QMode::Exact;
    if (sgn(q.im) == 0)
        v.point_ = q.re;
    else
        v.point_ = q;
    return v;
}

QValue QValue::approximate(Complex q) {
    if (!(std::abs(q) > 1.0)) throw DomainError("|q| > 1 required, got |q| = " + to_shortest(std::abs(q)));
    return approximate_unchecked(q);
}

QValue QValue::approximate_unchecked(Complex q) {
    QValue v;
    v.mode_ = QMode::Approximate;
    v.point_ = q;
    return v;
}

bool QValue::is_real() const {
    switch (mode_) {
        case QMode::Symbolic:
            return true;
        case QMode::Exact:
            return !is_gaussian();
        default:
            return complex().imag() == 0.0;
    }
}

double QValue::modulus() const { return std::abs(to_complex()); }

Complex QValue::to_complex() const {
    switch (mode_) {
        case QMode::Symbolic:
            throw DomainError("symbolic q has no numeric value");
        case QMode::Exact:
            if (is_gaussian()) return {gaussian().re.get_d(), gaussian().im.get_d()};
            return {rational().get_d(), 0.0};
        default:
            return complex();
    }
}

QValue QValue::to_approximate() const { return approximate_unchecked(to_complex()); }

std::string QValue::to_string() const {
    switch (mode_) {
        case QMode::Symbolic:
            return "symbolic";
        case QMode::Exact:
            if (is_gaussian()) return ring_traits<Gaussian>::to_string(gaussian());
            return rational().get_str();
        default:
            return "float:" + ring_traits<Complex>::to_string(complex());
    }
}

namespace {

double parse_double(const std::string& s) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw DomainError("not a number: '" + s + "'");
    return v;
}

}  // namespace

QValue QValue::parse(const std::string& text) {
    if (text == "symbolic") return symbolic();
    if (text.rfind("float:", 0) == 0) {
        std::string body = text.substr(6);
        auto semi = body.find(';');
        if (semi == std::string::npos) return approximate(Complex(parse_double(body), 0.0));
        return approximate(Complex(parse_double(body.substr(0, semi)), parse_double(body.substr(semi + 1))));
    }
    if (text.rfind("polar:", 0) == 0) {
        std::string body = text.substr(6);
        auto semi = body.find(';');
        if (semi == std::string::npos) throw DomainError("polar form needs modulus;angle");
        return approximate(std::polar(parse_double(body.substr(0, semi)), parse_double(body.substr(semi + 1))));
    }
    auto semi = text.find(';');
    if (semi != std::string::npos)
        return exact(Gaussian(parse_rational(text.substr(0, semi)), parse_rational(text.substr(semi + 1))));
    if (text.find_first_of(".eE") != std::string::npos) return approximate(Complex(parse_double(text), 0.0));
    return exact(parse_rational(text));
}

}  // namespace qflow
