#pragma once

#include <string>
#include <vector>

#include "pvar/linalg.hpp"

namespace pvar {

/// Overdetermined system A x ~ b with fixed vector z and weight p.
template <class T>
struct OverdeterminedProblem {
    Matrix<T> A;
    std::vector<T> b;
    std::vector<T> z;   // empty means all ones
    T p{1};

    void validate() const {
        const std::size_t n = A.size();
        if (n == 0 || A[0].empty()) throw ConstraintViolation("matrix is empty");
        for (const auto& row : A)
            if (row.size() != A[0].size()) throw ConstraintViolation("ragged matrix");
        if (b.size() != n) throw ConstraintViolation("rhs length differs from row count");
        if (!z.empty() && z.size() != n) throw ConstraintViolation("z length differs from row count");
        if (n < A[0].size()) throw ConstraintViolation("system must have at least as many rows as columns");
        if (p < T(0) || p > T(1)) throw ConstraintViolation("p must lie in [0, 1]");
        if (!(dot(fixed(), fixed()) > T(0))) throw ConstraintViolation("z must be nonzero");
    }

    std::vector<T> fixed() const { return z.empty() ? std::vector<T>(b.size(), T(1)) : z; }

    static T dot(const std::vector<T>& u, const std::vector<T>& v) {
        T s(0);
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
        return s;
    }
};

namespace detail {

template <class T>
std::vector<T> column_dots(const Matrix<T>& a, const std::vector<T>& v) {
    std::vector<T> out(a[0].size(), T(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += a[i][j] * v[i];
    return out;
}

/// Normal matrix A^T A - q (A^T z)(A^T z)^T and rhs A^T b - q (A^T z)(z^T b).
template <class T>
std::pair<Matrix<T>, std::vector<T>> modified_normal(const OverdeterminedProblem<T>& pr, const T& q) {
    const auto m = pr.A[0].size();
    auto zv = pr.fixed();
    auto az = column_dots(pr.A, zv);
    auto ab = column_dots(pr.A, pr.b);
    T zb = OverdeterminedProblem<T>::dot(zv, pr.b);
    Matrix<T> n = linalg::zeros<T>(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            T s(0);
            for (const auto& row : pr.A) s += row[i] * row[j];
            n[i][j] = s - q * az[i] * az[j];
        }
    std::vector<T> r(m);
    for (std::size_t i = 0; i < m; ++i) r[i] = ab[i] - q * az[i] * zb;
    return {std::move(n), std::move(r)};
}

}  // namespace detail

/// Ordinary least squares through the normal equations.
template <class T>
std::vector<T> ls_solve(const OverdeterminedProblem<T>& pr) {
    pr.validate();
    auto [n, r] = detail::modified_normal(pr, T(0));
    return linalg::solve_full_pivot(std::move(n), std::move(r));
}

/// Least p-variance solution relative to z.
template <class T>
std::vector<T> pv_solve(const OverdeterminedProblem<T>& pr) {
    pr.validate();
    auto zv = pr.fixed();
    T q = pr.p / OverdeterminedProblem<T>::dot(zv, zv);
    auto [n, r] = detail::modified_normal(pr, q);
    try {
        return linalg::solve_full_pivot(n, r);
    } catch (const RankDeficient&) {
        auto g = linalg::solve_general(n, r);
        std::string cols;
        for (auto c : g.free) cols += (cols.empty() ? "" : ",") + std::to_string(c);
        throw SingularModifiedSystem("modified normal matrix is singular; free unknowns {" + cols + "}");
    }
}

template <class T>
struct Objectives {
    T E;   // |Ax - b|^2
    T V;   // E - p (z^T(Ax - b))^2 / z^T z
};

template <class T>
Objectives<T> objectives(const OverdeterminedProblem<T>& pr, const std::vector<T>& x) {
    pr.validate();
    if (x.size() != pr.A[0].size()) throw ConstraintViolation("solution length differs from column count");
    auto r = linalg::matvec(pr.A, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= pr.b[i];
    auto zv = pr.fixed();
    T e = OverdeterminedProblem<T>::dot(r, r);
    T zr = OverdeterminedProblem<T>::dot(zv, r);
    return {e, e - pr.p * zr * zr / OverdeterminedProblem<T>::dot(zv, zv)};
}

}  // namespace pvar
