#pragma once

// Majorant-sequence check for a solved problem. With z_n the norm of the
// n-th recentered slice and M_n a log-convex weight, the sequence
//     w_1 = z_1,
//     w_n = c (beta_n/M_n + shift_n + sum_j alpha_{n-j}/M_{n-j} w_j
//              + [tau^n] sum_I A~_I(tau) w(tau)^{|I|})
// dominates z_n/M_n whenever the norm inequalities behind the recurrence
// hold. Norms are sampled, so the check is a consistency test.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "qflow/nagumo.hpp"
#include "qflow/solver.hpp"

namespace qflow {

enum class MajorantWeight {
    Auto,
    QFactorialRoot,  ///< ([n]!_{|q|})^{1/p}
    QGaussian,       ///< |q|^{n^2/2p}
    One,             ///< 1
    QGaussianShift,  ///< |q|^n |q|^{n^2/2}
};

enum class CertificatePath { Auto, XMajor, EMajor };

const char* weight_name(MajorantWeight w);
MajorantWeight parse_weight(const std::string& s);

struct CertificateOptions {
    MajorantWeight weight = MajorantWeight::Auto;
    CertificatePath path = CertificatePath::Auto;
    double r = 0.25;
    int samples = 64;
    double tol = 0.02;
};

struct MajorantCertificate {
    std::string weight;
    std::string path;
    double r = 0;
    int samples = 0;
    double tol = 0;
    double c = 0;                   ///< inverse bound (max over n for the p = 0 x-major case)
    std::vector<double> w;          ///< w_1..w_N
    std::vector<double> z;          ///< z_1..z_N
    std::vector<double> log_M;      ///< log M_1..log M_N
    std::vector<double> z_over_M;
    std::vector<bool> ok;
    bool valid = true;
};

namespace detail {

inline double log_weight(MajorantWeight w, int n, int p, double qabs) {
    const double lq = std::log(qabs);
    switch (w) {
        case MajorantWeight::QFactorialRoot:
            return static_cast<double>(log_qfactorial_abs(n, qabs)) / p;
        case MajorantWeight::QGaussian:
            return static_cast<double>(n) * n / (2.0 * p) * lq;
        case MajorantWeight::QGaussianShift:
            return (n + static_cast<double>(n) * n / 2.0) * lq;
        default:
            return 0.0;
    }
}

/// Sup over sampled points of |f| at radius rad (vector: max component).
inline double sampled_sup(const std::vector<Poly>& f, double rad, int samples) {
    double m = 0;
    for (int k = 0; k < samples; ++k) {
        const double a = 2 * std::numbers::pi * k / samples;
        const Complex x = std::polar(rad, a);
        for (const auto& c : f) m = std::max(m, poly_eval(c, x));
    }
    return m;
}

/// Row-sum over entry sups of a matrix polynomial on a circle.
inline double sampled_matrix_sup(const std::vector<std::vector<Poly>>& a, double rad, int samples) {
    double best = 0;
    for (const auto& row : a) {
        double s = 0;
        for (const auto& e : row) s += sampled_sup({e}, rad, samples);
        best = std::max(best, s);
    }
    return best;
}

/// sup over |t| <= rad of the row-sum norm of M(t)^{-1}, sampled on four
/// circles and the centre. Throws DomainError when M is numerically singular.
inline double inverse_sup(const std::vector<std::vector<Poly>>& M, double rad, int samples) {
    const size_t N = M.size();
    std::vector<double> entry_sup(N * N, 0.0);
    auto visit = [&](Complex t) {
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) {
                Complex acc(0.0, 0.0);
                const Poly& f = M[i][j];
                for (size_t k = f.size(); k-- > 0;) acc = acc * t + f[k];
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
            }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
        if (!lu.isInvertible()) throw DomainError("r exceeds the region where the leading matrix is invertible");
        Eigen::MatrixXcd inv = lu.inverse();
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j) {
                const double v = std::abs(inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                if (!std::isfinite(v)) throw DomainError("r exceeds the region where the leading matrix is invertible");
                entry_sup[i * N + j] = std::max(entry_sup[i * N + j], v);
            }
    };
    visit(Complex(0.0, 0.0));
    for (int ring = 1; ring <= 4; ++ring)
        for (int k = 0; k < samples; ++k) visit(std::polar(rad * ring / 4.0, 2 * std::numbers::pi * k / samples));
    double best = 0;
    for (size_t i = 0; i < N; ++i) {
        double s = 0;
        for (size_t j = 0; j < N; ++j) s += entry_sup[i * N + j];
        best = std::max(best, s);
    }
    return best;
}

/// Entry-wise Nagumo norm of a matrix polynomial (row-sum of entry norms).
inline double nagumo_matrix(const NagumoGrid& grid, const std::vector<std::vector<Poly>>& a, int n) {
    double best = 0;
    for (const auto& row : a) {
        double s = 0;
        for (const auto& e : row) s += profile_scalar(grid, e).norm(n);
        best = std::max(best, s);
    }
    return best;
}

}  // namespace detail

/// Builds the majorant sequence for the reduced problem and compares it with
/// the normalized slice norms.
template <class R>
MajorantCertificate majorant_certificate(const EquationSpec<R>& spec, int Nx, int Ne,
                                         const CertificateOptions& opt = {}) {
    static_assert(ring_traits<R>::numeric, "certificate needs numeric coefficients");
    if (!(opt.r > 0)) throw DomainError("certificate needs r > 0");
    const int p = spec.p;
    bool x_major;
    switch (opt.path) {
        case CertificatePath::XMajor: x_major = true; break;
        case CertificatePath::EMajor: x_major = false; break;
        default: x_major = p > 0;
    }
    if (x_major && p < 0) throw DomainError("x-major certificate is not available for p = -1");
    MajorantWeight weight = opt.weight;
    if (weight == MajorantWeight::Auto) {
        if (p == -1)
            weight = MajorantWeight::QGaussianShift;
        else if (x_major && p > 0)
            weight = spec.op == Operator::DQ ? MajorantWeight::QFactorialRoot : MajorantWeight::QGaussian;
        else
            weight = MajorantWeight::One;
    }
    if ((weight == MajorantWeight::QFactorialRoot || weight == MajorantWeight::QGaussian) && p <= 0)
        throw DomainError("weights with exponent 1/p need p > 0");

    Prepared<R> P = x_major ? prepare_x_major(spec, Nx, Ne) : prepare_e_major(spec, Nx, Ne);
    const auto& red = P.reduced;
    const int N = red.N;
    const int count = x_major ? Nx : P.eta_order;
    const double qabs = std::abs(static_cast<std::complex<double>>(
        Complex(static_cast<double>(ring_traits<R>::to_complex(red.q).real()),
                static_cast<double>(ring_traits<R>::to_complex(red.q).imag()))));

    MajorantCertificate cert;
    cert.weight = weight_name(weight);
    cert.path = x_major ? "x-major" : "e-major";
    cert.r = opt.r;
    cert.samples = opt.samples;
    cert.tol = opt.tol;
    if (count < 1) return cert;

    std::vector<double> logM(static_cast<size_t>(count) + 1);
    for (int n = 0; n <= count; ++n) logM[static_cast<size_t>(n)] = detail::log_weight(weight, n, std::max(p, 1), qabs);
    auto Mratio = [&](int a, int b) { return std::exp(logM[static_cast<size_t>(a)] - logM[static_cast<size_t>(b)]); };

    auto rows_of = [&](const Series2<R>& f) { return detail::extract_rows(f, x_major, count); };
    auto brows = rows_of(red.F.b);
    auto arows = rows_of(red.F.A);
    std::vector<std::pair<MultiIndex, std::vector<Series1<R>>>> nlrows;
    int max_deg = 1;
    for (const auto& t : red.F.nonlinear) {
        nlrows.emplace_back(t.I, rows_of(t.coeff));
        max_deg = std::max(max_deg, degree(t.I));
    }

    // Norms of the data and the solution.
    std::vector<double> alpha(static_cast<size_t>(count) + 1), beta(static_cast<size_t>(count) + 1),
        z(static_cast<size_t>(count) + 1), cn(static_cast<size_t>(count) + 1);
    std::vector<std::vector<double>> gamma(nlrows.size(), std::vector<double>(static_cast<size_t>(count) + 1));
    std::vector<double> shift_base(static_cast<size_t>(count) + 1, 0.0), shift_K(static_cast<size_t>(count) + 1, 1.0);
    int s = 1;
    if (x_major) {
        const int S = opt.samples;
        std::vector<R> cfac = detail::shift_factors(red.op, count, red.q);
        for (int n = 0; n <= count; ++n) {
            alpha[static_cast<size_t>(n)] = detail::sampled_matrix_sup(to_poly_matrix(arows[static_cast<size_t>(n)]), opt.r, S);
            beta[static_cast<size_t>(n)] = detail::sampled_sup(to_poly_vector(brows[static_cast<size_t>(n)]), opt.r, S);
            for (size_t i = 0; i < nlrows.size(); ++i)
                gamma[i][static_cast<size_t>(n)] = detail::sampled_sup(to_poly_vector(nlrows[i].second[static_cast<size_t>(n)]), opt.r, S);
        }
        if (p > 0) {
            s = p;
            const double c0 = detail::inverse_sup(to_poly_matrix(arows[0]), opt.r, S);
            for (int n = 1; n <= count; ++n) {
                cn[static_cast<size_t>(n)] = c0;
                z[static_cast<size_t>(n)] = detail::sampled_sup(to_poly_vector(P.rows[static_cast<size_t>(n)]), opt.r, S);
                shift_base[static_cast<size_t>(n)] = opt.r;
                const int k = n - p;
                if (k >= 1)
                    shift_K[static_cast<size_t>(n)] = red.op == Operator::DQ ? static_cast<double>(bracket_abs(k, qabs))
                                                                            : std::pow(qabs, k);
            }
        } else {
            // Shrinking disks r_n = r / max_{k<=n} |c(k)|.
            double cmax = 0;
            for (int n = 1; n <= count; ++n) {
                const auto ck = ring_traits<R>::to_complex(cfac[static_cast<size_t>(n)]);
                cmax = std::max(cmax, static_cast<double>(std::abs(ck)));
                const double rn = opt.r / cmax;
                auto M = to_poly_matrix(neg(arows[0]));
                for (int i = 0; i < N; ++i) {
                    auto& e = M[static_cast<size_t>(i)][static_cast<size_t>(i)];
                    if (e.size() < 2) e.resize(2, Complex(0.0, 0.0));
                    e[1] += Complex(static_cast<double>(ck.real()), static_cast<double>(ck.imag()));
                }
                cn[static_cast<size_t>(n)] = detail::inverse_sup(M, rn, S);
                z[static_cast<size_t>(n)] = detail::sampled_sup(to_poly_vector(P.rows[static_cast<size_t>(n)]), rn, S);
            }
        }
    } else {
        NagumoContext ctx;
        ctx.r = opt.r;
        ctx.q = Complex(qabs, 0.0);
        ctx.radial = 16;
        ctx.angular = opt.samples;
        ctx.uniform = 32;
        ctx.levels = 2;
        NagumoGrid grid(ctx, count + 1);
        const double c0 = detail::inverse_sup(to_poly_matrix(arows[0]), opt.r, opt.samples);
        for (int n = 0; n <= count; ++n) {
            alpha[static_cast<size_t>(n)] = detail::nagumo_matrix(grid, to_poly_matrix(arows[static_cast<size_t>(n)]), n);
            beta[static_cast<size_t>(n)] = profile_vector(grid, to_poly_vector(brows[static_cast<size_t>(n)])).norm(n);
            for (size_t i = 0; i < nlrows.size(); ++i)
                gamma[i][static_cast<size_t>(n)] =
                    profile_vector(grid, to_poly_vector(nlrows[i].second[static_cast<size_t>(n)])).norm(n);
            if (n >= 1) {
                cn[static_cast<size_t>(n)] = c0;
                z[static_cast<size_t>(n)] = profile_vector(grid, to_poly_vector(P.rows[static_cast<size_t>(n)])).norm(n);
                if (p == -1) {
                    shift_base[static_cast<size_t>(n)] = 2.0;
                    shift_K[static_cast<size_t>(n)] = std::pow(qabs, n);
                } else {
                    shift_base[static_cast<size_t>(n)] =
                        (red.op == Operator::DQ ? 2.0 : 1.0) * std::pow(opt.r, p + 1);
                }
            }
        }
    }

    // Majorant recursion with powers of w(tau) kept for the nonlinear part.
    std::vector<std::vector<double>> wpow(static_cast<size_t>(max_deg) + 1,
                                          std::vector<double>(static_cast<size_t>(count) + 1, 0.0));
    std::vector<double>& w = wpow[1];
    for (int n = 1; n <= count; ++n) {
        for (int k = 2; k <= max_deg; ++k) {
            double acc = 0;
            for (int i = 1; i < n; ++i) acc += wpow[static_cast<size_t>(k - 1)][static_cast<size_t>(n - i)] * w[static_cast<size_t>(i)];
            wpow[static_cast<size_t>(k)][static_cast<size_t>(n)] = acc;
        }
        double wn;
        if (n == 1) {
            wn = z[1];
        } else {
            double acc = beta[static_cast<size_t>(n)] / std::exp(logM[static_cast<size_t>(n)]);
            if (n - s >= 1 && shift_base[static_cast<size_t>(n)] > 0)
                acc += shift_base[static_cast<size_t>(n)] *
                       std::max(1.0, shift_K[static_cast<size_t>(n)] * Mratio(n - s, n)) * w[static_cast<size_t>(n - s)];
            for (int j = 1; j <= n - 1; ++j)
                acc += alpha[static_cast<size_t>(n - j)] / std::exp(logM[static_cast<size_t>(n - j)]) * w[static_cast<size_t>(j)];
            for (size_t i = 0; i < nlrows.size(); ++i) {
                const int d = degree(nlrows[i].first);
                for (int m = 0; m <= n - d; ++m)
                    acc += gamma[i][static_cast<size_t>(m)] / std::exp(logM[static_cast<size_t>(m)]) *
                           wpow[static_cast<size_t>(d)][static_cast<size_t>(n - m)];
            }
            wn = cn[static_cast<size_t>(n)] * acc;
        }
        w[static_cast<size_t>(n)] = wn;
        const double zm = z[static_cast<size_t>(n)] / std::exp(logM[static_cast<size_t>(n)]);
        const bool good = zm <= wn * (1 + opt.tol) + 1e-300;
        cert.w.push_back(wn);
        cert.z.push_back(z[static_cast<size_t>(n)]);
        cert.log_M.push_back(logM[static_cast<size_t>(n)]);
        cert.z_over_M.push_back(zm);
        cert.ok.push_back(good);
        cert.valid = cert.valid && good;
        cert.c = std::max(cert.c, cn[static_cast<size_t>(n)]);
    }
    return cert;
}

}  // namespace qflow
