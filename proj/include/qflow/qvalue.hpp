#pragma once

// The parameter q and dispatch to the matching coefficient ring.

#include <string>
#include <variant>

#include "qflow/qpoly.hpp"
#include "qflow/ring.hpp"

namespace qflow {

enum class QMode { Symbolic, Exact, Approximate };

class QValue {
public:
    /// q as an indeterminate; computations happen in Q[q].
    static QValue symbolic();
    /// Exact point. Requires |q|^2 > 1, decided exactly.
    static QValue exact(const Rational& q);
    static QValue exact(const Gaussian& q);
    /// Floating point value with |q| > 1.
    static QValue approximate(Complex q);
    /// Same as above without the |q| > 1 check; used for limits q -> 1.
    static QValue exact_unchecked(const Rational& q);
    static QValue approximate_unchecked(Complex q);

    /// Accepts "symbolic", "a/b", "re;im" (Gaussian, each part a fraction),
    /// "float:x", "float:re;im", "polar:modulus;angle", or a decimal number.
    static QValue parse(const std::string& text);

    QMode mode() const { return mode_; }
    bool is_symbolic() const { return mode_ == QMode::Symbolic; }
    bool is_gaussian() const { return std::holds_alternative<Gaussian>(point_); }
    bool is_real() const;
    const Rational& rational() const { return std::get<Rational>(point_); }
    const Gaussian& gaussian() const { return std::get<Gaussian>(point_); }
    const Complex& complex() const { return std::get<Complex>(point_); }
    /// |q| as a double; throws for symbolic q.
    double modulus() const;
    /// Numeric value; throws for symbolic q.
    Complex to_complex() const;
    /// The same point as a floating value.
    QValue to_approximate() const;
    std::string to_string() const;

private:
    QMode mode_ = QMode::Symbolic;
    std::variant<std::monostate, Rational, Gaussian, Complex> point_;
};

/// Calls f(q_in_ring) with q represented in the ring that matches its mode:
/// QPoly (symbolic), Rational, Gaussian or Complex.
template <class F>
decltype(auto) visit_ring(const QValue& qv, F&& f) {
    switch (qv.mode()) {
        case QMode::Symbolic:
            return f(QPoly::q());
        case QMode::Exact:
            if (qv.is_gaussian()) return f(qv.gaussian());
            return f(qv.rational());
        case QMode::Approximate:
        default:
            return f(qv.complex());
    }
}

}  // namespace qflow
