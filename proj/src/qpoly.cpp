#include "qflow/qpoly.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace qflow {

QPoly::QPoly(long c) {
    if (c != 0) terms_.emplace_back(0, Rational(c));
}

QPoly::QPoly(const Rational& c) {
    if (sgn(c) != 0) terms_.emplace_back(0, c);
}

QPoly QPoly::monomial(const Rational& c, int exponent) {
    if (exponent < 0) throw DomainError("negative exponent in QPoly");
    QPoly p;
    if (sgn(c) != 0) p.terms_.emplace_back(exponent, c);
    return p;
}

QPoly QPoly::from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
    QPoly p;
    for (auto& t : terms) {
        if (t.first < 0) throw DomainError("negative exponent in QPoly");
        if (!p.terms_.empty() && p.terms_.back().first == t.first) {
            p.terms_.back().second += t.second;
            if (sgn(p.terms_.back().second) == 0) p.terms_.pop_back();
        } else if (sgn(t.second) != 0) {
            p.terms_.push_back(std::move(t));
        }
    }
    return p;
}

Rational QPoly::constant_term() const { return coeff(0); }

Rational QPoly::coeff(int exponent) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exponent,
                               [](const Term& t, int e) { return t.first < e; });
    if (it != terms_.end() && it->first == exponent) return it->second;
    return Rational(0);
}

namespace {

QPoly merge(const QPoly& a, const QPoly& b, bool subtract) {
    const auto& x = a.terms();
    const auto& y = b.terms();
    std::vector<QPoly::Term> out;
    out.reserve(x.size() + y.size());
    size_t i = 0;
    size_t j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            out.push_back(x[i++]);
        } else if (i == x.size() || y[j].first < x[i].first) {
            out.emplace_back(y[j].first, subtract ? Rational(-y[j].second) : y[j].second);
            ++j;
        } else {
            Rational c = subtract ? Rational(x[i].second - y[j].second) : Rational(x[i].second + y[j].second);
            if (sgn(c) != 0) out.emplace_back(x[i].first, std::move(c));
            ++i;
            ++j;
        }
    }
    return QPoly::from_terms(std::move(out));
}

}  // namespace

QPoly operator+(const QPoly& a, const QPoly& b) { return merge(a, b, false); }
QPoly operator-(const QPoly& a, const QPoly& b) { return merge(a, b, true); }

QPoly operator-(const QPoly& a) {
    QPoly r = a;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
}

QPoly operator*(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return QPoly();
    const int lo = a.low_degree() + b.low_degree();
    const int hi = a.degree() + b.degree();
    const double span_a = a.degree() - a.low_degree() + 1;
    const double span_b = b.degree() - b.low_degree() + 1;
    const bool dense = a.term_count() / span_a > 0.5 && b.term_count() / span_b > 0.5;
    QPoly r;
    if (dense) {
        std::vector<Rational> acc(static_cast<size_t>(hi - lo + 1));
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) acc[static_cast<size_t>(ea + eb - lo)] += ca * cb;
        for (int e = lo; e <= hi; ++e) {
            auto& c = acc[static_cast<size_t>(e - lo)];
            if (sgn(c) != 0) r.terms_.emplace_back(e, std::move(c));
        }
    } else {
        std::map<int, Rational> acc;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) acc[ea + eb] += ca * cb;
        for (auto& [e, c] : acc)
            if (sgn(c) != 0) r.terms_.emplace_back(e, std::move(c));
    }
    return r;
}

QPoly QPoly::scaled(const Rational& c) const {
    if (sgn(c) == 0) return QPoly();
    QPoly r = *this;
    for (auto& t : r.terms_) t.second *= c;
    return r;
}

QPoly QPoly::subs_power(int k) const {
    if (k < 1) throw DomainError("subs_power needs k >= 1");
    QPoly r = *this;
    for (auto& t : r.terms_) t.first *= k;
    return r;
}

std::pair<QPoly, QPoly> QPoly::divmod(const QPoly& divisor) const {
    if (divisor.is_zero()) throw DomainError("division by the zero polynomial");
    const int dd = divisor.degree();
    const Rational lead = divisor.terms_.back().second;
    if (degree() < dd) return {QPoly(), *this};
    // Dense long division from the top.
    const int top = degree();
    std::vector<Rational> rem(static_cast<size_t>(top + 1));
    for (const auto& [e, c] : terms_) rem[static_cast<size_t>(e)] = c;
    std::vector<Rational> quo(static_cast<size_t>(top - dd + 1));
    for (int e = top; e >= dd; --e) {
        if (sgn(rem[static_cast<size_t>(e)]) == 0) continue;
        Rational f = rem[static_cast<size_t>(e)] / lead;
        quo[static_cast<size_t>(e - dd)] = f;
        for (const auto& [de, dc] : divisor.terms_) rem[static_cast<size_t>(e - dd + de)] -= f * dc;
    }
    std::vector<Term> qt;
    std::vector<Term> rt;
    for (int e = 0; e <= top - dd; ++e)
        if (sgn(quo[static_cast<size_t>(e)]) != 0) qt.emplace_back(e, quo[static_cast<size_t>(e)]);
    for (int e = 0; e < dd && e <= top; ++e)
        if (sgn(rem[static_cast<size_t>(e)]) != 0) rt.emplace_back(e, rem[static_cast<size_t>(e)]);
    return {from_terms(std::move(qt)), from_terms(std::move(rt))};
}

QPoly QPoly::exact_div(const QPoly& divisor) const {
    auto [quo, rem] = divmod(divisor);
    if (!rem.is_zero())
        throw InexactDivision("(" + to_string() + ") / (" + divisor.to_string() + ") leaves " + rem.to_string());
    return quo;
}

std::string QPoly::to_string(const std::string& var) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const int e = it->first;
        Rational c = it->second;
        const bool neg = sgn(c) < 0;
        if (neg) c = -c;
        if (first) {
            if (neg) os << '-';
        } else {
            os << (neg ? " - " : " + ");
        }
        first = false;
        const bool unit = c == 1;
        if (!unit || e == 0) os << c.get_str();
        if (e > 0) {
            if (!unit) os << '*';
            os << var;
            if (e > 1) os << '^' << e;
        }
    }
    return os.str();
}

QPoly QPoly::parse(const std::string& text) {
    // Accepts sums of terms "c", "c*q^e", "q^e", "q", "c*q" with optional
    // whitespace; coefficients are integers or fractions.
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw DomainError("empty polynomial text");
    if (s == "0") return QPoly();
    std::vector<Term> terms;
    size_t pos = 0;
    while (pos < s.size()) {
        bool neg = false;
        if (s[pos] == '+' || s[pos] == '-') {
            neg = s[pos] == '-';
            ++pos;
        }
        size_t end = pos;
        while (end < s.size() && s[end] != '+' && s[end] != '-') ++end;
        std::string term = s.substr(pos, end - pos);
        pos = end;
        if (term.empty()) throw DomainError("malformed polynomial: '" + text + "'");
        Rational c(1);
        int e = 0;
        size_t qpos = term.find('q');
        std::string coef = qpos == std::string::npos ? term : term.substr(0, qpos);
        if (!coef.empty() && coef.back() == '*') coef.pop_back();
        if (!coef.empty()) c = parse_rational(coef);
        if (qpos != std::string::npos) {
            std::string rest = term.substr(qpos + 1);
            if (rest.empty()) {
                e = 1;
            } else if (rest[0] == '^') {
                e = std::stoi(rest.substr(1));
            } else {
                throw DomainError("malformed polynomial term: '" + term + "'");
            }
        }
        terms.emplace_back(e, neg ? Rational(-c) : c);
    }
    return from_terms(std::move(terms));
}

}  // namespace qflow
