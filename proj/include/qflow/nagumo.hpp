#pragma once

// q-Nagumo norms on a disk of radius r:
//     ||f||_n  = sup_{|x| <= r/|q|^n} |f(x)| d_n(|x|)^n,   rho = r/|q|,
//     d_n(t)   = r - |q|^n t  for rho/|q|^n <= t <= r/|q|^n,  r - rho below,
//     ||f||'_n = sup_{|x| <= r/q^n} |f(x)| (r - q^n |x|)^n    (real q > 1).
// Norms are estimated on a polar grid and are lower bounds of the suprema.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/ring.hpp"
#include "qflow/series.hpp"

namespace qflow {

using Poly = std::vector<Complex>;  ///< coefficients in increasing degree

struct NagumoContext {
    double r = 1.0;
    Complex q{2.0, 0.0};
    int radial = 256;   ///< points per geometric level
    int angular = 128;
    int uniform = 256;  ///< extra equally spaced radii on [0, r]
    int levels = 8;     ///< geometric levels beyond the highest order used

    double q_modulus() const { return std::abs(q); }
    double rho() const { return r / q_modulus(); }
    bool real_q() const { return q.imag() == 0.0 && q.real() > 1.0; }
};

/// d_n(t) for 0 <= t <= r/|q|^n; throws DomainError outside.
double dn_profile(double t, int n, const NagumoContext& ctx);

/// Sampling grid: radius 0, geometric levels r|q|^{-k} u with
/// u in (1/|q|, 1], and equally spaced radii; angles 2 pi j / angular.
class NagumoGrid {
public:
    NagumoGrid(const NagumoContext& ctx, int max_order);

    const NagumoContext& context() const { return ctx_; }
    int max_order() const { return max_order_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::vector<Complex>& unit_angles() const { return angles_; }

private:
    NagumoContext ctx_;
    int max_order_;
    std::vector<double> radii_;  ///< increasing
    std::vector<Complex> angles_;
};

/// Max modulus of a function on each grid circle.
class RadialProfile {
public:
    RadialProfile() = default;
    RadialProfile(const NagumoGrid* grid, std::vector<double> maxabs) : grid_(grid), maxabs_(std::move(maxabs)) {}

    /// ||f||_n from the cached circle maxima.
    double norm(int n) const;
    /// ||f||'_n; requires real q > 1.
    double norm_prime(int n) const;
    const std::vector<double>& maxabs() const { return maxabs_; }

private:
    const NagumoGrid* grid_ = nullptr;
    std::vector<double> maxabs_;
};

double poly_eval(const Poly& f, Complex x);
RadialProfile profile_scalar(const NagumoGrid& grid, const Poly& f);
/// Max over components of |f_i| at each point.
RadialProfile profile_vector(const NagumoGrid& grid, const std::vector<Poly>& f);
/// Row-sum of |a_ij| at each point.
RadialProfile profile_matrix(const NagumoGrid& grid, const std::vector<std::vector<Poly>>& a);

/// Single-norm entry points on a fresh grid.
double nagumo_norm(const Poly& f, int n, const NagumoContext& ctx);
double nagumo_norm_prime(const Poly& f, int n, const NagumoContext& ctx);

// Polynomial helpers on complex coefficients.
Poly poly_add(const Poly& f, const Poly& g);
Poly poly_mul(const Poly& f, const Poly& g);
Poly poly_dq(const Poly& f, Complex q);
Poly poly_sigmaq(const Poly& f, Complex q);

/// Converts a scalar, vector or matrix series to complex polynomials.
template <class R>
Poly to_poly(const Series1<R>& f, int i = 0, int j = 0) {
    Poly p(static_cast<size_t>(f.order()) + 1);
    for (int k = 0; k <= f.order(); ++k) {
        ComplexLD v = ring_traits<R>::to_complex(f.at(k, i, j));
        p[static_cast<size_t>(k)] = Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    }
    return p;
}

template <class R>
std::vector<Poly> to_poly_vector(const Series1<R>& f) {
    std::vector<Poly> out;
    for (int i = 0; i < f.rows(); ++i) out.push_back(to_poly(f, i, 0));
    return out;
}

template <class R>
std::vector<std::vector<Poly>> to_poly_matrix(const Series1<R>& f) {
    std::vector<std::vector<Poly>> out(static_cast<size_t>(f.rows()));
    for (int i = 0; i < f.rows(); ++i)
        for (int j = 0; j < f.cols(); ++j) out[static_cast<size_t>(i)].push_back(to_poly(f, i, j));
    return out;
}

// ------------------------------------------------------ inequality checks

struct NormSamplePlan {
    int count = 500;
    int max_degree = 8;
    double coefficient_bound = 1.0;
    std::uint64_t seed = 1;
    int n_max = 5;
    int m_max = 5;
    double slack = 1.02;
    bool primed = true;       ///< primed checks run only for real q
    int system_count = 50;    ///< random 2x2 matrix / vector pairs
};

struct NormViolation {
    std::string inequality;
    int sample = 0;
    int n = 0;
    int m = 0;
    double lhs = 0;
    double rhs = 0;
};

struct NormReport {
    std::vector<std::string> inequalities;  ///< names of the checks run
    long checks = 0;
    std::vector<NormViolation> violations;
    double tightness_ratio = 0;     ///< ||sigma_q 1||_{n+1} / ||1||_n at n = 0
    double tightness_expected = 0;  ///< r (1 - 1/|q|)
    double worst_ratio = 0;         ///< max lhs/rhs over all checks
};

/// Random-sample verification of the Nagumo norm inequalities.
NormReport check_norm_inequalities(const NormSamplePlan& plan, const NagumoContext& ctx);

/// sup_{|x| <= r} |f(x)| (r - |x|)^n on `radial` equally spaced radii.
double classical_nagumo_norm(const Poly& f, int n, double r, int radial, int angular);

struct ClassicalLimitRow {
    int n = 0;
    double max_rel_diff = 0;  ///< max over samples of |primed - classical| / classical
};

/// Primed norms at real q near 1 against the classical weight, on
/// min(plan.count, 20) random polynomials drawn like the inequality samples.
std::vector<ClassicalLimitRow> classical_limit_comparison(const NormSamplePlan& plan, const NagumoContext& ctx);

}  // namespace qflow
