#pragma once

// Truncated power series in one variable (Series1) and two variables
// (Series2) over a coefficient ring R. Every coefficient is a rows x cols
// block: rows = N, cols = 1 for vectors, N x N for matrices, 1 x 1 for
// scalars. A 1 x 1 operand broadcasts against any block in products.

#include <algorithm>
#include <map>
#include <vector>

#include "qflow/errors.hpp"
#include "qflow/parallel.hpp"
#include "qflow/qcalc.hpp"
#include "qflow/ring.hpp"

namespace qflow {

namespace detail {

inline void check_product_shape(int ar, int ac, int br, int bc, int& rr, int& rc) {
    if (ar * ac == 1) {
        rr = br;
        rc = bc;
    } else if (br * bc == 1) {
        rr = ar;
        rc = ac;
    } else if (ac == br) {
        rr = ar;
        rc = bc;
    } else {
        throw DimensionError("block shapes " + std::to_string(ar) + "x" + std::to_string(ac) + " and " +
                             std::to_string(br) + "x" + std::to_string(bc) + " do not multiply");
    }
}

template <class R>
bool block_is_zero(const R* a, int size) {
    for (int i = 0; i < size; ++i)
        if (!ring_traits<R>::is_zero(a[i])) return false;
    return true;
}

/// out += a * b for blocks, with scalar broadcasting. Shapes must already be
/// checked by check_product_shape.
template <class R>
void mac_block(R* out, const R* a, int ar, int ac, const R* b, int br, int bc) {
    using T = ring_traits<R>;
    if (ar * ac == 1) {
        if (T::is_zero(a[0])) return;
        for (int i = 0; i < br * bc; ++i)
            if (!T::is_zero(b[i])) out[i] += a[0] * b[i];
    } else if (br * bc == 1) {
        if (T::is_zero(b[0])) return;
        for (int i = 0; i < ar * ac; ++i)
            if (!T::is_zero(a[i])) out[i] += a[i] * b[0];
    } else {
        for (int i = 0; i < ar; ++i)
            for (int k = 0; k < ac; ++k) {
                const R& aik = a[i * ac + k];
                if (T::is_zero(aik)) continue;
                for (int j = 0; j < bc; ++j) {
                    const R& bkj = b[k * bc + j];
                    if (!T::is_zero(bkj)) out[i * bc + j] += aik * bkj;
                }
            }
    }
}

}  // namespace detail

// ---------------------------------------------------------------- Series1

template <class R>
class Series1 {
public:
    Series1() = default;
    explicit Series1(int order, int rows = 1, int cols = 1)
        : order_(order), rows_(rows), cols_(cols),
          c_(static_cast<size_t>(order + 1) * rows * cols, ring_traits<R>::zero()) {
        if (order < 0 || rows < 1 || cols < 1) throw DimensionError("invalid Series1 shape");
    }
    /// Constant series with the given block.
    static Series1 constant(int order, const Matrix<R>& m) {
        Series1 s(order, m.n, m.n);
        std::copy(m.a.begin(), m.a.end(), s.c_.begin());
        return s;
    }
    static Series1 identity(int order, int n) { return constant(order, Matrix<R>::identity(n)); }

    int order() const { return order_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int block_size() const { return rows_ * cols_; }

    R& at(int k, int i = 0, int j = 0) { return c_[index(k, i, j)]; }
    const R& at(int k, int i = 0, int j = 0) const { return c_[index(k, i, j)]; }
    R* block(int k) { return c_.data() + static_cast<size_t>(k) * block_size(); }
    const R* block(int k) const { return c_.data() + static_cast<size_t>(k) * block_size(); }
    bool block_zero(int k) const { return detail::block_is_zero(block(k), block_size()); }
    bool is_zero() const {
        for (const auto& v : c_)
            if (!ring_traits<R>::is_zero(v)) return false;
        return true;
    }
    /// Index of the first nonzero block; order()+1 if none.
    int valuation() const {
        for (int k = 0; k <= order_; ++k)
            if (!block_zero(k)) return k;
        return order_ + 1;
    }
    Matrix<R> block_matrix(int k) const {
        if (rows_ != cols_) throw DimensionError("block is not square");
        Matrix<R> m(rows_);
        std::copy(block(k), block(k) + block_size(), m.a.begin());
        return m;
    }
    /// Scalar series of entry (i, j).
    Series1 entry(int i, int j = 0) const {
        Series1 s(order_);
        for (int k = 0; k <= order_; ++k) s.at(k) = at(k, i, j);
        return s;
    }
    void set_entry(int i, int j, const Series1& s) {
        for (int k = 0; k <= order_; ++k) at(k, i, j) = k <= s.order() ? s.at(k) : ring_traits<R>::zero();
    }
    const std::vector<R>& data() const { return c_; }
    std::vector<R>& data() { return c_; }

    friend bool operator==(const Series1& a, const Series1& b) {
        return a.order_ == b.order_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.c_ == b.c_;
    }

private:
    size_t index(int k, int i, int j) const {
        return (static_cast<size_t>(k) * rows_ + i) * cols_ + j;
    }
    int order_ = 0;
    int rows_ = 1;
    int cols_ = 1;
    std::vector<R> c_ = std::vector<R>(1, ring_traits<R>::zero());
};

template <class R>
Series1<R> crop(const Series1<R>& f, int order) {
    Series1<R> g(order, f.rows(), f.cols());
    for (int k = 0; k <= std::min(order, f.order()); ++k) std::copy(f.block(k), f.block(k) + f.block_size(), g.block(k));
    return g;
}

template <class R>
Series1<R> add(const Series1<R>& f, const Series1<R>& g) {
    if (f.rows() != g.rows() || f.cols() != g.cols()) throw DimensionError("Series1 add: shape mismatch");
    Series1<R> h(std::min(f.order(), g.order()), f.rows(), f.cols());
    for (size_t i = 0; i < h.data().size(); ++i) h.data()[i] = R(f.data()[i] + g.data()[i]);
    return h;
}

template <class R>
Series1<R> sub(const Series1<R>& f, const Series1<R>& g) {
    if (f.rows() != g.rows() || f.cols() != g.cols()) throw DimensionError("Series1 sub: shape mismatch");
    Series1<R> h(std::min(f.order(), g.order()), f.rows(), f.cols());
    for (size_t i = 0; i < h.data().size(); ++i) h.data()[i] = R(f.data()[i] - g.data()[i]);
    return h;
}

template <class R>
Series1<R> neg(const Series1<R>& f) {
    Series1<R> h = f;
    for (auto& v : h.data()) v = R(-v);
    return h;
}

template <class R>
Series1<R> scale(const Series1<R>& f, const R& c) {
    Series1<R> h = f;
    for (auto& v : h.data())
        if (!ring_traits<R>::is_zero(v)) v = R(v * c);
    return h;
}

/// Cauchy product, truncated at the smaller order.
template <class R>
Series1<R> mul(const Series1<R>& f, const Series1<R>& g) {
    int rr = 0;
    int rc = 0;
    detail::check_product_shape(f.rows(), f.cols(), g.rows(), g.cols(), rr, rc);
    const int order = std::min(f.order(), g.order());
    Series1<R> h(order, rr, rc);
    std::vector<int> fz;
    std::vector<int> gz;
    for (int k = 0; k <= order; ++k) {
        if (!f.block_zero(k)) fz.push_back(k);
        if (!g.block_zero(k)) gz.push_back(k);
    }
    if (fz.empty() || gz.empty()) return h;
    auto row = [&](int n) {
        for (int i : fz) {
            if (i > n) break;
            int j = n - i;
            if (g.block_zero(j)) continue;
            detail::mac_block(h.block(n), f.block(i), f.rows(), f.cols(), g.block(j), g.rows(), g.cols());
        }
    };
    const int work = static_cast<int>(fz.size() * gz.size()) * h.block_size();
    if (work > 4096)
        parallel_for(order + 1, row, 4);
    else
        for (int n = 0; n <= order; ++n) row(n);
    return h;
}

/// t^s * f, keeping the order.
template <class R>
Series1<R> shift(const Series1<R>& f, int s) {
    Series1<R> h(f.order(), f.rows(), f.cols());
    for (int k = 0; k + s <= f.order(); ++k)
        if (k >= 0) std::copy(f.block(k), f.block(k) + f.block_size(), h.block(k + s));
    return h;
}

/// Solves M(t) v(t) = rhs(t) by undetermined coefficients, given the inverse
/// of the constant block M_0. Order of the result is min of the orders.
template <class R>
Series1<R> solve_linear(const Series1<R>& M, const Matrix<R>& M0inv, const Series1<R>& rhs) {
    const int n = M.rows();
    if (M.cols() != n || rhs.rows() != n) throw DimensionError("solve_linear: shape mismatch");
    const int order = std::min(M.order(), rhs.order());
    const int bc = rhs.cols();
    Series1<R> v(order, n, bc);
    std::vector<int> mz;
    for (int k = 1; k <= order; ++k)
        if (!M.block_zero(k)) mz.push_back(k);
    std::vector<R> acc(static_cast<size_t>(n) * bc);
    for (int k = 0; k <= order; ++k) {
        std::copy(rhs.block(k), rhs.block(k) + n * bc, acc.begin());
        std::vector<R> tmp(static_cast<size_t>(n) * bc, ring_traits<R>::zero());
        for (int i : mz) {
            if (i > k) break;
            detail::mac_block(tmp.data(), M.block(i), n, n, v.block(k - i), n, bc);
        }
        for (size_t e = 0; e < acc.size(); ++e) acc[e] = R(acc[e] - tmp[e]);
        if (detail::block_is_zero(acc.data(), n * bc)) continue;
        detail::mac_block(v.block(k), M0inv.a.data(), n, n, acc.data(), n, bc);
    }
    return v;
}

/// Two-sided inverse of a scalar or square-matrix series with invertible
/// constant block; throws NotAUnit otherwise.
template <class R>
Series1<R> invert_unit(const Series1<R>& f) {
    if (f.rows() != f.cols()) throw DimensionError("invert_unit: block not square");
    Matrix<R> m0 = invert(f.block_matrix(0));
    return solve_linear(f, m0, Series1<R>::identity(f.order(), f.rows()));
}

/// Jackson derivative: d_q(t^n) = [n]_q t^{n-1}. Order drops by one.
template <class R>
Series1<R> apply_dq(const Series1<R>& f, const R& q) {
    if (f.order() < 1) throw DomainError("apply_dq needs order >= 1");
    Series1<R> h(f.order() - 1, f.rows(), f.cols());
    std::vector<R> br = q_bracket_table(f.order(), q);
    for (int k = 0; k < f.order(); ++k)
        for (int e = 0; e < f.block_size(); ++e) {
            const R& c = f.block(k + 1)[e];
            if (!ring_traits<R>::is_zero(c)) h.block(k)[e] = R(br[static_cast<size_t>(k + 1)] * c);
        }
    return h;
}

/// Dilation: sigma_q(t^n) = q^n t^n.
template <class R>
Series1<R> apply_sigmaq(const Series1<R>& f, const R& q) {
    Series1<R> h = f;
    std::vector<R> qp = q_power_table(f.order(), q);
    for (int k = 1; k <= f.order(); ++k)
        for (int e = 0; e < f.block_size(); ++e) {
            R& c = h.block(k)[e];
            if (!ring_traits<R>::is_zero(c)) c = R(qp[static_cast<size_t>(k)] * c);
        }
    return h;
}

// ---------------------------------------------------------------- Series2

template <class R>
class Series2 {
public:
    Series2() : Series2(0, 0) {}
    Series2(int nx, int ne, int rows = 1, int cols = 1)
        : nx_(nx), ne_(ne), rows_(rows), cols_(cols),
          c_(static_cast<size_t>(nx + 1) * (ne + 1) * rows * cols, ring_traits<R>::zero()) {
        if (nx < 0 || ne < 0 || rows < 1 || cols < 1) throw DimensionError("invalid Series2 shape");
    }

    int nx() const { return nx_; }
    int ne() const { return ne_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int block_size() const { return rows_ * cols_; }

    R& at(int n, int m, int i = 0, int j = 0) { return c_[index(n, m, i, j)]; }
    const R& at(int n, int m, int i = 0, int j = 0) const { return c_[index(n, m, i, j)]; }
    /// Entry with the convention that coefficients outside the table are zero.
    R get(int n, int m, int i = 0, int j = 0) const {
        if (n < 0 || m < 0 || n > nx_ || m > ne_) return ring_traits<R>::zero();
        return at(n, m, i, j);
    }
    R* block(int n, int m) { return c_.data() + (static_cast<size_t>(n) * (ne_ + 1) + m) * block_size(); }
    const R* block(int n, int m) const {
        return c_.data() + (static_cast<size_t>(n) * (ne_ + 1) + m) * block_size();
    }
    bool block_zero(int n, int m) const { return detail::block_is_zero(block(n, m), block_size()); }
    bool is_zero() const {
        for (const auto& v : c_)
            if (!ring_traits<R>::is_zero(v)) return false;
        return true;
    }
    const std::vector<R>& data() const { return c_; }
    std::vector<R>& data() { return c_; }

    friend bool operator==(const Series2& a, const Series2& b) {
        return a.nx_ == b.nx_ && a.ne_ == b.ne_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.c_ == b.c_;
    }
    friend bool operator!=(const Series2& a, const Series2& b) { return !(a == b); }

private:
    size_t index(int n, int m, int i, int j) const {
        return ((static_cast<size_t>(n) * (ne_ + 1) + m) * rows_ + i) * cols_ + j;
    }
    int nx_;
    int ne_;
    int rows_;
    int cols_;
    std::vector<R> c_;
};

/// Crops or zero-pads to the given orders.
template <class R>
Series2<R> resize(const Series2<R>& f, int nx, int ne) {
    Series2<R> g(nx, ne, f.rows(), f.cols());
    for (int n = 0; n <= std::min(nx, f.nx()); ++n)
        for (int m = 0; m <= std::min(ne, f.ne()); ++m)
            std::copy(f.block(n, m), f.block(n, m) + f.block_size(), g.block(n, m));
    return g;
}

template <class R>
Series2<R> crop(const Series2<R>& f, int nx, int ne) {
    if (nx > f.nx() || ne > f.ne()) throw DimensionError("crop beyond truncation");
    return resize(f, nx, ne);
}

namespace detail {

template <class R, class Op>
Series2<R> entrywise(const Series2<R>& f, const Series2<R>& g, Op op, const char* what) {
    if (f.rows() != g.rows() || f.cols() != g.cols())
        throw DimensionError(std::string(what) + ": shape mismatch");
    Series2<R> h(std::min(f.nx(), g.nx()), std::min(f.ne(), g.ne()), f.rows(), f.cols());
    const int bs = f.block_size();
    for (int n = 0; n <= h.nx(); ++n)
        for (int m = 0; m <= h.ne(); ++m)
            for (int e = 0; e < bs; ++e) h.block(n, m)[e] = op(f.block(n, m)[e], g.block(n, m)[e]);
    return h;
}

}  // namespace detail

template <class R>
Series2<R> add(const Series2<R>& f, const Series2<R>& g) {
    return detail::entrywise(f, g, [](const R& a, const R& b) { return R(a + b); }, "s2_add");
}

template <class R>
Series2<R> sub(const Series2<R>& f, const Series2<R>& g) {
    return detail::entrywise(f, g, [](const R& a, const R& b) { return R(a - b); }, "s2_sub");
}

template <class R>
Series2<R> neg(const Series2<R>& f) {
    Series2<R> h = f;
    for (auto& v : h.data()) v = R(-v);
    return h;
}

template <class R>
Series2<R> scale(const Series2<R>& f, const R& c) {
    Series2<R> h = f;
    for (auto& v : h.data())
        if (!ring_traits<R>::is_zero(v)) v = R(v * c);
    return h;
}

/// Truncated double Cauchy product; rows of the output are computed in
/// parallel, each by a single worker.
template <class R>
Series2<R> mul(const Series2<R>& f, const Series2<R>& g) {
    int rr = 0;
    int rc = 0;
    detail::check_product_shape(f.rows(), f.cols(), g.rows(), g.cols(), rr, rc);
    const int nx = std::min(f.nx(), g.nx());
    const int ne = std::min(f.ne(), g.ne());
    Series2<R> h(nx, ne, rr, rc);
    std::vector<std::pair<int, int>> fnz;
    std::vector<char> gnz(static_cast<size_t>(nx + 1) * (ne + 1), 0);
    for (int n = 0; n <= nx; ++n)
        for (int m = 0; m <= ne; ++m) {
            if (!f.block_zero(n, m)) fnz.emplace_back(n, m);
            gnz[static_cast<size_t>(n) * (ne + 1) + m] = !g.block_zero(n, m);
        }
    if (fnz.empty()) return h;
    parallel_for(nx + 1, [&](int n) {
        for (const auto& [i, j] : fnz) {
            if (i > n) break;
            for (int m = j; m <= ne; ++m) {
                if (!gnz[static_cast<size_t>(n - i) * (ne + 1) + (m - j)]) continue;
                detail::mac_block(h.block(n, m), f.block(i, j), f.rows(), f.cols(), g.block(n - i, m - j), g.rows(),
                                  g.cols());
            }
        }
    });
    return h;
}

/// Inverse of a scalar or square-matrix series whose constant block is
/// invertible; throws NotAUnit otherwise.
template <class R>
Series2<R> invert_unit(const Series2<R>& f) {
    if (f.rows() != f.cols()) throw DimensionError("invert_unit: block not square");
    const int N = f.rows();
    Matrix<R> f00(N);
    std::copy(f.block(0, 0), f.block(0, 0) + N * N, f00.a.begin());
    Matrix<R> inv0 = invert(f00);
    Series2<R> g(f.nx(), f.ne(), N, N);
    std::vector<std::pair<int, int>> fnz;
    for (int n = 0; n <= f.nx(); ++n)
        for (int m = 0; m <= f.ne(); ++m)
            if ((n || m) && !f.block_zero(n, m)) fnz.emplace_back(n, m);
    std::vector<R> acc(static_cast<size_t>(N) * N);
    for (int n = 0; n <= f.nx(); ++n)
        for (int m = 0; m <= f.ne(); ++m) {
            std::fill(acc.begin(), acc.end(), ring_traits<R>::zero());
            if (n == 0 && m == 0)
                for (int i = 0; i < N; ++i) acc[static_cast<size_t>(i) * N + i] = ring_traits<R>::one();
            std::vector<R> tmp(static_cast<size_t>(N) * N, ring_traits<R>::zero());
            for (const auto& [i, j] : fnz) {
                if (i > n) break;
                if (j > m) continue;
                detail::mac_block(tmp.data(), f.block(i, j), N, N, g.block(n - i, m - j), N, N);
            }
            for (size_t e = 0; e < acc.size(); ++e) acc[e] = R(acc[e] - tmp[e]);
            detail::mac_block(g.block(n, m), inv0.a.data(), N, N, acc.data(), N, N);
        }
    return g;
}

/// d_q along x: coefficient rule on the n index; Nx drops by one.
template <class R>
Series2<R> dq_x(const Series2<R>& f, const R& q) {
    if (f.nx() < 1) throw DomainError("dq_x needs Nx >= 1");
    Series2<R> h(f.nx() - 1, f.ne(), f.rows(), f.cols());
    std::vector<R> br = q_bracket_table(f.nx(), q);
    for (int n = 0; n < f.nx(); ++n)
        for (int m = 0; m <= f.ne(); ++m)
            for (int e = 0; e < f.block_size(); ++e) {
                const R& c = f.block(n + 1, m)[e];
                if (!ring_traits<R>::is_zero(c)) h.block(n, m)[e] = R(br[static_cast<size_t>(n + 1)] * c);
            }
    return h;
}

/// sigma_q along x: a[n][m] -> q^n a[n][m].
template <class R>
Series2<R> sigmaq_x(const Series2<R>& f, const R& q) {
    Series2<R> h = f;
    std::vector<R> qp = q_power_table(f.nx(), q);
    for (int n = 1; n <= f.nx(); ++n)
        for (int m = 0; m <= f.ne(); ++m)
            for (int e = 0; e < f.block_size(); ++e) {
                R& c = h.block(n, m)[e];
                if (!ring_traits<R>::is_zero(c)) c = R(qp[static_cast<size_t>(n)] * c);
            }
    return h;
}

/// x-major slice: y_n(eps) = sum_m a[n][m] eps^m.
template <class R>
Series1<R> slice_x_major(const Series2<R>& f, int n) {
    if (n < 0 || n > f.nx()) throw DimensionError("slice_x_major: index out of range");
    Series1<R> s(f.ne(), f.rows(), f.cols());
    for (int m = 0; m <= f.ne(); ++m) std::copy(f.block(n, m), f.block(n, m) + f.block_size(), s.block(m));
    return s;
}

/// eps-major slice: u_m(x) = sum_n a[n][m] x^n.
template <class R>
Series1<R> slice_e_major(const Series2<R>& f, int m) {
    if (m < 0 || m > f.ne()) throw DimensionError("slice_e_major: index out of range");
    Series1<R> s(f.nx(), f.rows(), f.cols());
    for (int n = 0; n <= f.nx(); ++n) std::copy(f.block(n, m), f.block(n, m) + f.block_size(), s.block(n));
    return s;
}

/// Reassembles a table from x-major slices y_0..y_Nx (each of order >= ne).
template <class R>
Series2<R> from_x_slices(const std::vector<Series1<R>>& rows, int ne) {
    if (rows.empty()) throw DimensionError("from_x_slices: no rows");
    Series2<R> f(static_cast<int>(rows.size()) - 1, ne, rows[0].rows(), rows[0].cols());
    for (int n = 0; n <= f.nx(); ++n)
        for (int m = 0; m <= std::min(ne, rows[static_cast<size_t>(n)].order()); ++m)
            std::copy(rows[static_cast<size_t>(n)].block(m), rows[static_cast<size_t>(n)].block(m) + f.block_size(),
                      f.block(n, m));
    return f;
}

/// Reassembles a table from eps-major slices u_0..u_Ne (each of order >= nx).
template <class R>
Series2<R> from_e_slices(const std::vector<Series1<R>>& cols, int nx) {
    if (cols.empty()) throw DimensionError("from_e_slices: no columns");
    Series2<R> f(nx, static_cast<int>(cols.size()) - 1, cols[0].rows(), cols[0].cols());
    for (int m = 0; m <= f.ne(); ++m)
        for (int n = 0; n <= std::min(nx, cols[static_cast<size_t>(m)].order()); ++n)
            std::copy(cols[static_cast<size_t>(m)].block(n), cols[static_cast<size_t>(m)].block(n) + f.block_size(),
                      f.block(n, m));
    return f;
}

/// Scalar component i of a vector-valued table.
template <class R>
Series2<R> component(const Series2<R>& f, int i, int j = 0) {
    Series2<R> g(f.nx(), f.ne());
    for (int n = 0; n <= f.nx(); ++n)
        for (int m = 0; m <= f.ne(); ++m) g.at(n, m) = f.at(n, m, i, j);
    return g;
}

/// Converts coefficients between rings with a per-entry map.
template <class S, class R, class Fn>
Series2<S> map_ring(const Series2<R>& f, Fn fn) {
    Series2<S> g(f.nx(), f.ne(), f.rows(), f.cols());
    for (size_t i = 0; i < f.data().size(); ++i) g.data()[i] = fn(f.data()[i]);
    return g;
}

// ------------------------------------------------ F(x, eps, y) evaluation

/// One nonlinear term A_I(x, eps) y^I with |I| >= 2.
template <class R>
struct NonlinearTerm {
    MultiIndex I;
    Series2<R> coeff;  ///< N x 1 blocks
};

/// F(x, eps, y) = b + A y + sum_I A_I y^I as polynomial data; coefficients
/// outside each table are zero.
template <class R>
struct FData {
    Series2<R> b;  ///< N x 1
    Series2<R> A;  ///< N x N
    std::vector<NonlinearTerm<R>> nonlinear;

    int dim() const { return b.rows(); }
};

/// y^I for scalar component series, caching partial powers by multi-index.
template <class R>
class PowerCache {
public:
    explicit PowerCache(const std::vector<Series2<R>>& y) : y_(y) {}
    const Series2<R>& power(const MultiIndex& I) {
        auto it = cache_.find(I);
        if (it != cache_.end()) return it->second;
        int last = -1;
        for (int l = static_cast<int>(I.size()) - 1; l >= 0; --l)
            if (I[static_cast<size_t>(l)] > 0) {
                last = l;
                break;
            }
        Series2<R> value;
        if (last < 0) {
            value = Series2<R>(y_.at(0).nx(), y_.at(0).ne());
            value.at(0, 0) = ring_traits<R>::one();
        } else {
            MultiIndex J = I;
            --J[static_cast<size_t>(last)];
            value = mul(power(J), y_[static_cast<size_t>(last)]);
        }
        return cache_.emplace(I, std::move(value)).first->second;
    }

private:
    const std::vector<Series2<R>>& y_;
    std::map<MultiIndex, Series2<R>> cache_;
};

/// Evaluates F at y (N scalar tables with zero constant term); the result is
/// truncated at the orders of y.
template <class R>
Series2<R> substitute_y(const FData<R>& F, const std::vector<Series2<R>>& y) {
    const int N = F.dim();
    if (static_cast<int>(y.size()) != N) throw DimensionError("substitute_y: wrong number of components");
    const int nx = y[0].nx();
    const int ne = y[0].ne();
    for (const auto& c : y) {
        if (c.rows() != 1 || c.cols() != 1 || c.nx() != nx || c.ne() != ne)
            throw DimensionError("substitute_y: components must be scalar tables of equal order");
        if (!ring_traits<R>::is_zero(c.at(0, 0))) throw DomainError("substitute_y: y must vanish at the origin");
    }
    Series2<R> yv(nx, ne, N, 1);
    for (int l = 0; l < N; ++l)
        for (int n = 0; n <= nx; ++n)
            for (int m = 0; m <= ne; ++m) yv.at(n, m, l) = y[static_cast<size_t>(l)].at(n, m);
    Series2<R> out = add(resize(F.b, nx, ne), mul(resize(F.A, nx, ne), yv));
    PowerCache<R> cache(y);
    for (const auto& term : F.nonlinear) {
        if (static_cast<int>(term.I.size()) != N) throw DimensionError("substitute_y: multi-index length");
        out = add(out, mul(resize(term.coeff, nx, ne), cache.power(term.I)));
    }
    return out;
}

}  // namespace qflow
