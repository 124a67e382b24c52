#include "qflow/nagumo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qflow/parallel.hpp"

namespace qflow {

namespace {

double level_radius(const NagumoContext& ctx, int k) { return ctx.r / std::pow(ctx.q_modulus(), k); }

// d_n without the domain check; radii above r/|q|^n give 0.
double dn_raw(double t, int n, const NagumoContext& ctx) {
    const double qn = std::pow(ctx.q_modulus(), n);
    if (t * qn >= ctx.rho()) return std::max(0.0, ctx.r - qn * t);
    return ctx.r - ctx.rho();
}

void check_context(const NagumoContext& ctx) {
    if (!(ctx.r > 0)) throw DomainError("Nagumo norms need r > 0");
    if (!(ctx.q_modulus() > 1)) throw DomainError("Nagumo norms need |q| > 1");
    if (ctx.radial < 1 || ctx.angular < 1 || ctx.uniform < 0 || ctx.levels < 1)
        throw DomainError("invalid Nagumo grid size");
}

}  // namespace

double dn_profile(double t, int n, const NagumoContext& ctx) {
    check_context(ctx);
    if (n < 0) throw DomainError("d_n needs n >= 0");
    const double bound = level_radius(ctx, n);
    if (t < 0 || t > bound * (1 + 1e-15)) throw DomainError("d_n: radius outside [0, r/|q|^n]");
    return dn_raw(t, n, ctx);
}

NagumoGrid::NagumoGrid(const NagumoContext& ctx, int max_order) : ctx_(ctx), max_order_(max_order) {
    check_context(ctx);
    const double qabs = ctx.q_modulus();
    radii_.push_back(0.0);
    for (int k = 0; k <= max_order + ctx.levels; ++k) {
        const double top = level_radius(ctx, k);
        for (int i = 1; i <= ctx.radial; ++i) {
            const double u = i == ctx.radial ? 1.0 : 1.0 / qabs + (1.0 - 1.0 / qabs) * i / ctx.radial;
            radii_.push_back(top * u);
        }
    }
    for (int i = 1; i <= ctx.uniform; ++i) radii_.push_back(ctx.r * i / ctx.uniform);
    std::sort(radii_.begin(), radii_.end());
    radii_.erase(std::unique(radii_.begin(), radii_.end()), radii_.end());
    for (int j = 0; j < ctx.angular; ++j) {
        const double a = 2 * std::numbers::pi * j / ctx.angular;
        angles_.emplace_back(std::cos(a), std::sin(a));
    }
}

double RadialProfile::norm(int n) const {
    if (!grid_) throw DomainError("empty radial profile");
    const auto& ctx = grid_->context();
    const double bound = level_radius(ctx, n);
    const auto& radii = grid_->radii();
    double best = 0;
    for (size_t i = 0; i < radii.size() && radii[i] <= bound; ++i) {
        const double w = n == 0 ? 1.0 : std::pow(dn_raw(radii[i], n, ctx), n);
        best = std::max(best, maxabs_[i] * w);
    }
    return best;
}

double RadialProfile::norm_prime(int n) const {
    if (!grid_) throw DomainError("empty radial profile");
    const auto& ctx = grid_->context();
    if (!ctx.real_q()) throw DomainError("primed Nagumo norms need real q > 1");
    const double qn = std::pow(ctx.q.real(), n);
    const double bound = level_radius(ctx, n);
    const auto& radii = grid_->radii();
    double best = 0;
    for (size_t i = 0; i < radii.size() && radii[i] <= bound; ++i) {
        const double w = n == 0 ? 1.0 : std::pow(std::max(0.0, ctx.r - qn * radii[i]), n);
        best = std::max(best, maxabs_[i] * w);
    }
    return best;
}

double poly_eval(const Poly& f, Complex x) {
    // Horner on real parts; std::complex products go through the slow
    // Annex G path.
    const double xr = x.real();
    const double xi = x.imag();
    double ar = 0;
    double ai = 0;
    for (size_t k = f.size(); k-- > 0;) {
        const double t = ar * xr - ai * xi + f[k].real();
        ai = ar * xi + ai * xr + f[k].imag();
        ar = t;
    }
    return std::sqrt(ar * ar + ai * ai);
}

namespace {

/// |f| at radius * angles[j] for all j. Horner runs across the angles so
/// the inner loop has no dependency chain.
void circle_abs(const Poly& f, double radius, const std::vector<Complex>& angles, std::vector<double>& xr,
                std::vector<double>& xi, std::vector<double>& ar, std::vector<double>& ai, std::vector<double>& out) {
    const size_t K = angles.size();
    for (size_t j = 0; j < K; ++j) {
        xr[j] = radius * angles[j].real();
        xi[j] = radius * angles[j].imag();
        ar[j] = 0;
        ai[j] = 0;
    }
    for (size_t k = f.size(); k-- > 0;) {
        const double cr = f[k].real();
        const double ci = f[k].imag();
        for (size_t j = 0; j < K; ++j) {
            const double t = ar[j] * xr[j] - ai[j] * xi[j] + cr;
            ai[j] = ar[j] * xi[j] + ai[j] * xr[j] + ci;
            ar[j] = t;
        }
    }
    for (size_t j = 0; j < K; ++j) out[j] = std::sqrt(ar[j] * ar[j] + ai[j] * ai[j]);
}

/// Max over the circle of reduce(|f_0|, |f_1|, ...) for each grid radius.
template <class Reduce>
RadialProfile sample(const NagumoGrid& grid, const std::vector<const Poly*>& fs, Reduce reduce) {
    const auto& radii = grid.radii();
    const auto& angles = grid.unit_angles();
    const size_t K = angles.size();
    std::vector<double> xr(K), xi(K), ar(K), ai(K);
    std::vector<std::vector<double>> vals(fs.size(), std::vector<double>(K));
    std::vector<double> maxabs(radii.size(), 0.0);
    const std::vector<Complex> origin{Complex(1.0, 0.0)};
    for (size_t i = 0; i < radii.size(); ++i) {
        const bool zero = radii[i] == 0.0;
        const auto& ang = zero ? origin : angles;
        for (size_t l = 0; l < fs.size(); ++l) circle_abs(*fs[l], radii[i], ang, xr, xi, ar, ai, vals[l]);
        double m = 0;
        for (size_t j = 0; j < ang.size(); ++j) m = std::max(m, reduce(vals, j));
        maxabs[i] = m;
    }
    return {&grid, std::move(maxabs)};
}

}  // namespace

RadialProfile profile_scalar(const NagumoGrid& grid, const Poly& f) {
    return sample(grid, {&f}, [](const auto& v, size_t j) { return v[0][j]; });
}

RadialProfile profile_vector(const NagumoGrid& grid, const std::vector<Poly>& f) {
    std::vector<const Poly*> fs;
    for (const auto& c : f) fs.push_back(&c);
    return sample(grid, fs, [](const auto& v, size_t j) {
        double m = 0;
        for (const auto& c : v) m = std::max(m, c[j]);
        return m;
    });
}

RadialProfile profile_matrix(const NagumoGrid& grid, const std::vector<std::vector<Poly>>& a) {
    std::vector<const Poly*> fs;
    std::vector<size_t> row_len;
    for (const auto& row : a) {
        row_len.push_back(row.size());
        for (const auto& c : row) fs.push_back(&c);
    }
    return sample(grid, fs, [&row_len](const auto& v, size_t j) {
        double m = 0;
        size_t l = 0;
        for (size_t len : row_len) {
            double s = 0;
            for (size_t c = 0; c < len; ++c) s += v[l++][j];
            m = std::max(m, s);
        }
        return m;
    });
}

double nagumo_norm(const Poly& f, int n, const NagumoContext& ctx) {
    NagumoGrid grid(ctx, n);
    return profile_scalar(grid, f).norm(n);
}

double nagumo_norm_prime(const Poly& f, int n, const NagumoContext& ctx) {
    NagumoGrid grid(ctx, n);
    return profile_scalar(grid, f).norm_prime(n);
}

Poly poly_add(const Poly& f, const Poly& g) {
    Poly h(std::max(f.size(), g.size()), Complex(0.0, 0.0));
    for (size_t i = 0; i < f.size(); ++i) h[i] += f[i];
    for (size_t i = 0; i < g.size(); ++i) h[i] += g[i];
    return h;
}

Poly poly_mul(const Poly& f, const Poly& g) {
    if (f.empty() || g.empty()) return {};
    Poly h(f.size() + g.size() - 1, Complex(0.0, 0.0));
    for (size_t i = 0; i < f.size(); ++i)
        for (size_t j = 0; j < g.size(); ++j) h[i + j] += f[i] * g[j];
    return h;
}

Poly poly_dq(const Poly& f, Complex q) {
    if (f.size() <= 1) return {Complex(0.0, 0.0)};
    Poly h(f.size() - 1);
    Complex bracket(0.0, 0.0);
    Complex pw(1.0, 0.0);
    for (size_t k = 1; k < f.size(); ++k) {
        bracket += pw;
        pw *= q;
        h[k - 1] = bracket * f[k];
    }
    return h;
}

Poly poly_sigmaq(const Poly& f, Complex q) {
    Poly h(f.size());
    Complex pw(1.0, 0.0);
    for (size_t k = 0; k < f.size(); ++k) {
        h[k] = pw * f[k];
        pw *= q;
    }
    return h;
}

// ------------------------------------------------------------------ checker

namespace {

struct SampleOutcome {
    long checks = 0;
    double worst = 0;
    std::vector<NormViolation> violations;
};

Poly random_poly(std::mt19937_64& rng, int max_degree, double bound) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_real_distribution<double> coef(-bound, bound);
    Poly f(static_cast<size_t>(deg(rng)) + 1);
    for (auto& c : f) {
        const double re = coef(rng);
        const double im = coef(rng);
        c = Complex(re, im);
    }
    return f;
}

class Recorder {
public:
    Recorder(SampleOutcome& out, int sample, double slack) : out_(out), sample_(sample), slack_(slack) {}
    void check(const char* name, int n, int m, double lhs, double rhs) {
        ++out_.checks;
        if (rhs > 0) out_.worst = std::max(out_.worst, lhs / rhs);
        if (lhs > slack_ * rhs && lhs > 1e-300) out_.violations.push_back({name, sample_, n, m, lhs, rhs});
    }

private:
    SampleOutcome& out_;
    int sample_;
    double slack_;
};

}  // namespace

NormReport check_norm_inequalities(const NormSamplePlan& plan, const NagumoContext& ctx) {
    check_context(ctx);
    const double qabs = ctx.q_modulus();
    const bool primed = plan.primed && ctx.real_q();
    const int max_order = plan.n_max + plan.m_max + 1;
    NagumoGrid grid(ctx, max_order);
    const double sigma_const = ctx.r * (1 - 1 / qabs);

    NormReport report;
    report.inequalities = {"sum", "product", "dq", "sigmaq", "matrix-vector product", "vector sum", "vector dq"};
    if (primed) {
        report.inequalities.insert(report.inequalities.end(),
                                   {"primed sum", "primed product", "primed dq", "primed sigmaq"});
    }

    const int total = plan.count + plan.system_count;
    std::vector<SampleOutcome> outcomes(static_cast<size_t>(total));
    parallel_for(total, [&](int s) {
        std::mt19937_64 rng(plan.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(s) + 1);
        SampleOutcome& out = outcomes[static_cast<size_t>(s)];
        Recorder rec(out, s, plan.slack);
        if (s < plan.count) {
            const Poly f = random_poly(rng, plan.max_degree, plan.coefficient_bound);
            const Poly g = random_poly(rng, plan.max_degree, plan.coefficient_bound);
            const auto pf = profile_scalar(grid, f);
            const auto pg = profile_scalar(grid, g);
            const auto psum = profile_scalar(grid, poly_add(f, g));
            const auto pprod = profile_scalar(grid, poly_mul(f, g));
            const auto pdq = profile_scalar(grid, poly_dq(f, ctx.q));
            const auto psig = profile_scalar(grid, poly_sigmaq(f, ctx.q));
            for (int n = 0; n <= plan.n_max; ++n) {
                const double fn = pf.norm(n);
                rec.check("sum", n, n, psum.norm(n), fn + pg.norm(n));
                rec.check("dq", n, 0, pdq.norm(n + 1), 2 * std::pow(qabs, n + 1) * fn);
                rec.check("sigmaq", n, 0, psig.norm(n + 1), sigma_const * fn);
                for (int m = 0; m <= plan.m_max; ++m) rec.check("product", n, m, pprod.norm(n + m), fn * pg.norm(m));
                if (primed) {
                    const double qr = ctx.q.real();
                    const double fp = pf.norm_prime(n);
                    rec.check("primed sum", n, n, psum.norm_prime(n), fp + pg.norm_prime(n));
                    rec.check("primed dq", n, 0, pdq.norm_prime(n + 1), std::numbers::e * std::pow(qr, n) * (n + 1) * fp);
                    rec.check("primed sigmaq", n, 0, psig.norm_prime(n + 1), ctx.r * fp);
                    for (int m = 0; m <= plan.m_max; ++m)
                        rec.check("primed product", n, m, pprod.norm_prime(n + m), fp * pg.norm_prime(m));
                }
            }
        } else {
            // 2x2 systems: matrix-vector product, vector sum, componentwise d_q.
            const int deg = std::max(1, plan.max_degree / 2);
            std::vector<std::vector<Poly>> A(2, std::vector<Poly>(2));
            for (auto& row : A)
                for (auto& c : row) c = random_poly(rng, deg, plan.coefficient_bound);
            std::vector<Poly> z{random_poly(rng, deg, plan.coefficient_bound), random_poly(rng, deg, plan.coefficient_bound)};
            std::vector<Poly> v{random_poly(rng, deg, plan.coefficient_bound), random_poly(rng, deg, plan.coefficient_bound)};
            std::vector<Poly> Az(2);
            std::vector<Poly> zv(2);
            std::vector<Poly> dz(2);
            for (size_t i = 0; i < 2; ++i) {
                Az[i] = poly_add(poly_mul(A[i][0], z[0]), poly_mul(A[i][1], z[1]));
                zv[i] = poly_add(z[i], v[i]);
                dz[i] = poly_dq(z[i], ctx.q);
            }
            std::vector<std::vector<RadialProfile>> pA(2);
            for (size_t i = 0; i < 2; ++i)
                for (size_t j = 0; j < 2; ++j) pA[i].push_back(profile_scalar(grid, A[i][j]));
            // Row-sum of entry norms.
            auto matrix_norm = [&](int n) {
                double best = 0;
                for (const auto& row : pA) best = std::max(best, row[0].norm(n) + row[1].norm(n));
                return best;
            };
            const auto pz = profile_vector(grid, z);
            const auto pv = profile_vector(grid, v);
            const auto pAz = profile_vector(grid, Az);
            const auto pzv = profile_vector(grid, zv);
            const auto pdz = profile_vector(grid, dz);
            for (int n = 0; n <= plan.n_max; ++n) {
                rec.check("vector sum", n, n, pzv.norm(n), pz.norm(n) + pv.norm(n));
                rec.check("vector dq", n, 0, pdz.norm(n + 1), 2 * std::pow(qabs, n + 1) * pz.norm(n));
                for (int m = 0; m <= plan.m_max; ++m)
                    rec.check("matrix-vector product", n, m, pAz.norm(n + m), matrix_norm(n) * pz.norm(m));
            }
        }
    });
    for (auto& o : outcomes) {
        report.checks += o.checks;
        report.worst_ratio = std::max(report.worst_ratio, o.worst);
        report.violations.insert(report.violations.end(), o.violations.begin(), o.violations.end());
    }
    // Tightness probe for the sigma_q constant: f = 1.
    const auto one = profile_scalar(grid, Poly{Complex(1.0, 0.0)});
    report.tightness_ratio = one.norm(1) / one.norm(0);
    report.tightness_expected = sigma_const;
    return report;
}

}  // namespace qflow

namespace qflow {

double classical_nagumo_norm(const Poly& f, int n, double r, int radial, int angular) {
    if (!(r > 0) || radial < 1 || angular < 1) throw DomainError("classical Nagumo norm needs r > 0 and a nonempty grid");
    double best = 0;
    for (int i = 0; i <= radial; ++i) {
        const double t = r * i / radial;
        double mx = 0;
        for (int j = 0; j < (i == 0 ? 1 : angular); ++j)
            mx = std::max(mx, std::abs(poly_eval(f, std::polar(t, 2 * std::numbers::pi * j / angular))));
        best = std::max(best, mx * std::pow(r - t, n));
    }
    return best;
}

std::vector<ClassicalLimitRow> classical_limit_comparison(const NormSamplePlan& plan, const NagumoContext& ctx) {
    if (!ctx.real_q()) throw DomainError("classical limit comparison needs real q > 1");
    const int count = std::min(plan.count, 20);
    std::vector<ClassicalLimitRow> rows(static_cast<size_t>(plan.n_max) + 1);
    for (int n = 0; n <= plan.n_max; ++n) rows[static_cast<size_t>(n)].n = n;
    if (count <= 0) return rows;
    const NagumoGrid grid(ctx, plan.n_max);
    std::mt19937_64 rng(plan.seed);
    const int radial = std::max(ctx.uniform, 256);
    for (int s = 0; s < count; ++s) {
        const Poly f = random_poly(rng, plan.max_degree, plan.coefficient_bound);
        const auto prof = profile_scalar(grid, f);
        for (int n = 0; n <= plan.n_max; ++n) {
            const double a = prof.norm_prime(n);
            const double b = classical_nagumo_norm(f, n, ctx.r, radial, ctx.angular);
            if (b > 0) {
                auto& row = rows[static_cast<size_t>(n)];
                row.max_rel_diff = std::max(row.max_rel_diff, std::abs(a - b) / b);
            }
        }
    }
    return rows;
}

}  // namespace qflow
