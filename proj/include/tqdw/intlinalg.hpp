#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tqdw {

using i64 = std::int64_t;

// Dense integer matrix, row-major. Small sizes only (representative
// complexes, constraint systems on desk-scale lattices).
struct IMat {
    int rows = 0, cols = 0;
    std::vector<i64> a;

    IMat() = default;
    IMat(int r, int c) : rows(r), cols(c), a((size_t)r * c, 0) {}
    i64& at(int r, int c) { return a[(size_t)r * cols + c]; }
    i64 at(int r, int c) const { return a[(size_t)r * cols + c]; }

    static IMat identity(int n) {
        IMat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    IMat transposed() const {
        IMat t(cols, rows);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
        return t;
    }

    friend IMat operator*(const IMat& x, const IMat& y) {
        if (x.cols != y.rows) throw std::invalid_argument("IMat: shape mismatch");
        IMat z(x.rows, y.cols);
        for (int i = 0; i < x.rows; ++i)
            for (int k = 0; k < x.cols; ++k) {
                i64 v = x.at(i, k);
                if (!v) continue;
                for (int j = 0; j < y.cols; ++j) {
                    __int128 acc = (__int128)z.at(i, j) + (__int128)v * y.at(k, j);
                    if (acc > INT64_MAX || acc < INT64_MIN)
                        throw std::overflow_error("IMat: multiply overflow");
                    z.at(i, j) = (i64)acc;
                }
            }
        return z;
    }

    std::vector<i64> apply(const std::vector<i64>& v) const {
        if ((int)v.size() != cols) throw std::invalid_argument("IMat: vector size");
        std::vector<i64> out(rows, 0);
        for (int r = 0; r < rows; ++r) {
            __int128 acc = 0;
            for (int c = 0; c < cols; ++c) acc += (__int128)at(r, c) * v[c];
            if (acc > INT64_MAX || acc < INT64_MIN)
                throw std::overflow_error("IMat: apply overflow");
            out[r] = (i64)acc;
        }
        return out;
    }

    bool is_zero() const {
        for (i64 v : a) if (v) return false;
        return true;
    }
};

// Smith normal form: U*A*V = D with U, V unimodular and D diagonal,
// each diagonal entry dividing the next.
struct SmithForm {
    IMat u, d, v;
    int rank = 0;
};

namespace detail {

inline void add_row(IMat& m, int dst, int src, i64 f) {
    for (int c = 0; c < m.cols; ++c) {
        __int128 acc = (__int128)m.at(dst, c) + (__int128)f * m.at(src, c);
        if (acc > INT64_MAX || acc < INT64_MIN) throw std::overflow_error("SNF: overflow");
        m.at(dst, c) = (i64)acc;
    }
}
inline void add_col(IMat& m, int dst, int src, i64 f) {
    for (int r = 0; r < m.rows; ++r) {
        __int128 acc = (__int128)m.at(r, dst) + (__int128)f * m.at(r, src);
        if (acc > INT64_MAX || acc < INT64_MIN) throw std::overflow_error("SNF: overflow");
        m.at(r, dst) = (i64)acc;
    }
}
inline void swap_rows(IMat& m, int i, int j) {
    for (int c = 0; c < m.cols; ++c) std::swap(m.at(i, c), m.at(j, c));
}
inline void swap_cols(IMat& m, int i, int j) {
    for (int r = 0; r < m.rows; ++r) std::swap(m.at(r, i), m.at(r, j));
}
inline void negate_row(IMat& m, int i) {
    for (int c = 0; c < m.cols; ++c) m.at(i, c) = -m.at(i, c);
}

} // namespace detail

inline SmithForm smith_normal_form(IMat a) {
    using namespace detail;
    SmithForm s;
    s.u = IMat::identity(a.rows);
    s.v = IMat::identity(a.cols);
    int t = 0;
    int n = std::min(a.rows, a.cols);
    while (t < n) {
        // find pivot with smallest absolute value in the remaining block
        int pr = -1, pc = -1;
        i64 best = 0;
        for (int r = t; r < a.rows; ++r)
            for (int c = t; c < a.cols; ++c) {
                i64 v = a.at(r, c) < 0 ? -a.at(r, c) : a.at(r, c);
                if (v != 0 && (pr < 0 || v < best)) { pr = r; pc = c; best = v; }
            }
        if (pr < 0) break;
        swap_rows(a, t, pr); swap_rows(s.u, t, pr);
        swap_cols(a, t, pc); swap_cols(s.v, t, pc);
        bool done = false;
        while (!done) {
            done = true;
            for (int r = t + 1; r < a.rows; ++r) {
                if (a.at(r, t) == 0) continue;
                i64 q = a.at(r, t) / a.at(t, t);
                add_row(a, r, t, -q); add_row(s.u, r, t, -q);
                if (a.at(r, t) != 0) {
                    swap_rows(a, t, r); swap_rows(s.u, t, r);
                    done = false;
                }
            }
            for (int c = t + 1; c < a.cols; ++c) {
                if (a.at(t, c) == 0) continue;
                i64 q = a.at(t, c) / a.at(t, t);
                add_col(a, c, t, -q); add_col(s.v, c, t, -q);
                if (a.at(t, c) != 0) {
                    swap_cols(a, t, c); swap_cols(s.v, t, c);
                    done = false;
                }
            }
        }
        // divisibility fix-up: pivot must divide the rest of the block
        bool redo = false;
        for (int r = t + 1; r < a.rows && !redo; ++r)
            for (int c = t + 1; c < a.cols && !redo; ++c)
                if (a.at(r, c) % a.at(t, t) != 0) {
                    add_row(a, t, r, 1); add_row(s.u, t, r, 1);
                    redo = true;
                }
        if (redo) continue;
        if (a.at(t, t) < 0) { negate_row(a, t); negate_row(s.u, t); }
        ++t;
    }
    s.d = std::move(a);
    s.rank = t;
    return s;
}

// Solve A x = b over the integers. Returns a particular solution, or
// nullopt if none exists.
struct ZSolver {
    SmithForm snf;
    int cols = 0;

    explicit ZSolver(const IMat& a) : snf(smith_normal_form(a)), cols(a.cols) {}

    std::optional<std::vector<i64>> solve(const std::vector<i64>& b) const {
        std::vector<i64> ub = snf.u.apply(b);
        std::vector<i64> y(cols, 0);
        for (int i = 0; i < (int)ub.size(); ++i) {
            if (i < snf.rank) {
                if (ub[i] % snf.d.at(i, i) != 0) return std::nullopt;
                y[i] = ub[i] / snf.d.at(i, i);
            } else if (ub[i] != 0) {
                return std::nullopt;
            }
        }
        return snf.v.apply(y);
    }

    // columns of V past rank form a kernel basis
    std::vector<std::vector<i64>> kernel_basis() const {
        std::vector<std::vector<i64>> ker;
        for (int c = snf.rank; c < cols; ++c) {
            std::vector<i64> k(cols);
            for (int r = 0; r < cols; ++r) k[r] = snf.v.at(r, c);
            ker.push_back(std::move(k));
        }
        return ker;
    }
};

// Hermite normal form (column style): A*V = H with V unimodular, H lower
// triangular with positive pivots; used for canonical lifts of Z_f.
inline IMat hermite_normal_form(IMat a) {
    using namespace detail;
    int r = 0, c = 0;
    while (r < a.rows && c < a.cols) {
        int pc = -1;
        i64 best = 0;
        for (int j = c; j < a.cols; ++j) {
            i64 v = a.at(r, j) < 0 ? -a.at(r, j) : a.at(r, j);
            if (v != 0 && (pc < 0 || v < best)) { pc = j; best = v; }
        }
        if (pc < 0) { ++r; continue; }
        swap_cols(a, c, pc);
        bool done = false;
        while (!done) {
            done = true;
            for (int j = c + 1; j < a.cols; ++j) {
                if (a.at(r, j) == 0) continue;
                i64 q = a.at(r, j) / a.at(r, c);
                add_col(a, j, c, -q);
                if (a.at(r, j) != 0) { swap_cols(a, c, j); done = false; }
            }
        }
        if (a.at(r, c) < 0)
            for (int i = 0; i < a.rows; ++i) a.at(i, c) = -a.at(i, c);
        // reduce entries to the left of the pivot
        for (int j = 0; j < c; ++j) {
            i64 q = a.at(r, j) / a.at(r, c);
            if (a.at(r, j) % a.at(r, c) < 0) q -= 1;
            if (q) add_col(a, j, c, -q);
        }
        ++r; ++c;
    }
    return a;
}

// Exact determinant by fraction-free (Bareiss) elimination; |values| must
// stay within int64 which holds for the small matrices used here.
inline i64 det_bareiss(IMat m) {
    if (m.rows != m.cols) throw std::invalid_argument("det: square only");
    int n = m.rows;
    i64 sign = 1, prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            int p = -1;
            for (int i = k + 1; i < n; ++i)
                if (m.at(i, k) != 0) { p = i; break; }
            if (p < 0) return 0;
            detail::swap_rows(m, k, p);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                __int128 v = ((__int128)m.at(i, j) * m.at(k, k) -
                              (__int128)m.at(i, k) * m.at(k, j));
                v /= prev;
                if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("det: overflow");
                m.at(i, j) = (i64)v;
            }
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

} // namespace tqdw
