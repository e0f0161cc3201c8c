#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pvar/scalar.hpp"

namespace pvar {

template <class T>
using Matrix = std::vector<std::vector<T>>;

namespace linalg {

template <class T>
Matrix<T> zeros(std::size_t r, std::size_t c) {
    return Matrix<T>(r, std::vector<T>(c, T(0)));
}

template <class T>
T max_abs(const Matrix<T>& a) {
    T m(0);
    for (const auto& row : a)
        for (const auto& v : row)
            if (num<T>::abs(v) > m) m = num<T>::abs(v);
    return m;
}

template <class T>
bool negligible(const T& v, const T& scale) {
    if constexpr (num<T>::exact) {
        return v == T(0);
    } else {
        return num<T>::abs(v) <= float_tolerance() * (scale > T(0) ? scale : T(1));
    }
}

/// Determinant: fraction-free Bareiss for exact scalars, partial-pivot LU for floats.
template <class T>
T det(Matrix<T> a) {
    const std::size_t n = a.size();
    if (n == 0) return T(1);
    if constexpr (num<T>::exact) {
        T sign(1), prev(1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (a[k][k] == T(0)) {
                std::size_t p = k + 1;
                while (p < n && a[p][k] == T(0)) ++p;
                if (p == n) return T(0);
                std::swap(a[k], a[p]);
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i)
                for (std::size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            prev = a[k][k];
        }
        return sign * a[n - 1][n - 1];
    } else {
        double d = 1;
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::fabs(a[i][k]) > std::fabs(a[p][k])) p = i;
            if (a[p][k] == 0) return 0;
            if (p != k) {
                std::swap(a[p], a[k]);
                d = -d;
            }
            d *= a[k][k];
            for (std::size_t i = k + 1; i < n; ++i) {
                double f = a[i][k] / a[k][k];
                for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            }
        }
        return d;
    }
}

/// Square solve with full pivoting. Throws RankDeficient when a pivot vanishes.
template <class T>
std::vector<T> solve_full_pivot(Matrix<T> a, std::vector<T> b) {
    const std::size_t n = a.size();
    const T scale = max_abs(a);
    std::vector<std::size_t> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        T best(-1);
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = k; j < n; ++j)
                if (num<T>::abs(a[i][j]) > best) best = num<T>::abs(a[i][j]), pr = i, pc = j;
        if (negligible(best, scale)) throw RankDeficient("matrix rank " + std::to_string(k) + " < " + std::to_string(n));
        std::swap(a[k], a[pr]);
        std::swap(b[k], b[pr]);
        if (pc != k) {
            for (auto& row : a) std::swap(row[k], row[pc]);
            std::swap(col[k], col[pc]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            if (a[i][k] == T(0)) continue;
            T f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<T> y(n, T(0));
    for (std::size_t k = n; k-- > 0;) {
        T s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * y[j];
        y[k] = s / a[k][k];
    }
    std::vector<T> x(n, T(0));
    for (std::size_t k = 0; k < n; ++k) x[col[k]] = y[k];
    return x;
}

template <class T>
struct GeneralSolution {
    std::vector<T> x;                 // particular solution, free unknowns set to 0
    std::vector<std::size_t> free;    // non-pivot columns in natural order
    bool consistent = true;
};

/// Rectangular solve by Gauss-Jordan elimination in column order.
template <class T>
GeneralSolution<T> solve_general(Matrix<T> a, std::vector<T> b) {
    const std::size_t rows = a.size(), cols = rows ? a[0].size() : 0;
    const T scale = max_abs(a);
    GeneralSolution<T> out;
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols; ++c) {
        if (r >= rows) {
            out.free.push_back(c);
            continue;
        }
        std::size_t p = r;
        for (std::size_t i = r; i < rows; ++i)
            if (num<T>::abs(a[i][c]) > num<T>::abs(a[p][c])) p = i;
        if (negligible(num<T>::abs(a[p][c]), scale)) {
            out.free.push_back(c);
            continue;
        }
        std::swap(a[r], a[p]);
        std::swap(b[r], b[p]);
        T piv = a[r][c];
        for (std::size_t j = c; j < cols; ++j) a[r][j] /= piv;
        b[r] /= piv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == T(0)) continue;
            T f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivots.push_back(c);
        ++r;
    }
    T bscale(0);
    for (const auto& v : b)
        if (num<T>::abs(v) > bscale) bscale = num<T>::abs(v);
    for (std::size_t i = r; i < rows; ++i)
        if (!negligible(b[i], T(scale > bscale ? scale : bscale))) out.consistent = false;
    out.x.assign(cols, T(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) out.x[pivots[i]] = b[i];
    return out;
}

template <class T>
std::vector<T> matvec(const Matrix<T>& a, const std::vector<T>& x) {
    std::vector<T> y(a.size(), T(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
    return y;
}

template <class T>
Matrix<T> transpose(const Matrix<T>& a) {
    if (a.empty()) return {};
    Matrix<T> t = zeros<T>(a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
    return t;
}

}  // namespace linalg
}  // namespace pvar
