#pragma once

#include <string>
#include <vector>

#include "pvar/linalg.hpp"
#include "pvar/pcov.hpp"

namespace pvar {

template <class T>
struct UncorrelatedBasis {
    std::vector<Element<T>> elements;   // X_0..X_n
    std::vector<T> variances;           // var_p(X_k)
    std::vector<Element<T>> sources;    // V_0..V_n
    bool monic = true;
};

template <class T>
Matrix<T> cov_matrix(const PCovOp<T>& op, const std::vector<Element<T>>& v, std::size_t count) {
    Matrix<T> m = linalg::zeros<T>(count, count);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i; j < count; ++j) m[i][j] = m[j][i] = op.cov(v[i], v[j]);
    return m;
}

/// Recursive generalized Gram-Schmidt. The last element may have zero
/// p-variance (it is never used as a divisor); any earlier one may not.
template <class T>
UncorrelatedBasis<T> gram_schmidt_p(const PCovOp<T>& op, const std::vector<Element<T>>& v) {
    UncorrelatedBasis<T> b;
    b.sources = v;
    for (std::size_t n = 0; n < v.size(); ++n) {
        Element<T> x = v[n];
        for (std::size_t k = 0; k < n; ++k) {
            T c = op.cov(b.elements[k], v[n]);
            if (c != T(0)) x -= b.elements[k] * T(c / b.variances[k]);
        }
        if constexpr (!num<T>::exact) {
            // second pass restores orthogonality lost to cancellation
            for (std::size_t k = 0; k < n; ++k)
                if (!op.is_zero_var(b.variances[k], b.elements[k]))
                    x -= b.elements[k] * T(op.cov(b.elements[k], x) / b.variances[k]);
        }
        T var = op.var(x);
        if (n + 1 < v.size() && op.is_zero_var(var, x))
            throw DegenerateBasis("var_p(X_" + std::to_string(n) + ") vanishes; the sources are dependent or the family is finite");
        b.elements.push_back(std::move(x));
        b.variances.push_back(var);
    }
    return b;
}

/// Delta_n: determinant of the p-covariance matrix of v_0..v_n; Delta_{-1} = 1.
template <class T>
T gram_det(const PCovOp<T>& op, const std::vector<Element<T>>& v, long n) {
    if (n < -1) throw ConstraintViolation("gram_det needs n >= -1");
    if (n == -1) return T(1);
    if (static_cast<std::size_t>(n) >= v.size()) throw ConstraintViolation("not enough sources");
    return linalg::det(cov_matrix(op, v, static_cast<std::size_t>(n + 1)));
}

/// X_n from the bordered determinant, expanded along its last row.
/// With monic = true the result is divided by Delta_{n-1}.
template <class T>
Element<T> element_by_determinant(const PCovOp<T>& op, const std::vector<Element<T>>& v, long n, bool monic = true) {
    if (n < 0 || static_cast<std::size_t>(n) >= v.size()) throw ConstraintViolation("index out of range");
    const auto N = static_cast<std::size_t>(n);
    Matrix<T> rows = linalg::zeros<T>(N, N + 1);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j <= N; ++j) rows[i][j] = op.cov(v[i], v[j]);
    Element<T> out;
    T delta_prev(1);
    for (std::size_t j = 0; j <= N; ++j) {
        Matrix<T> minor = linalg::zeros<T>(N, N);
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t c = 0, cc = 0; c <= N; ++c)
                if (c != j) minor[i][cc++] = rows[i][c];
        T cof = linalg::det(minor);
        if ((N + j) % 2) cof = -cof;
        if (j == N) delta_prev = cof;
        if (cof != T(0)) out += v[j] * cof;
    }
    if (!monic) return out;
    bool zero;
    if constexpr (num<T>::exact) {
        zero = delta_prev == T(0);
    } else {
        zero = std::fabs(delta_prev) < 1e-300;
    }
    if (zero) throw DegenerateBasis("Delta_{n-1} vanishes");
    return out * T(T(1) / delta_prev);
}

/// G_j = X_j - (1 - sqrt(1-p)) proj_Z X_j; mutually orthogonal with E(G_j^2) = var_p(X_j).
template <class T>
std::vector<Element<T>> orthogonal_companion(const PCovOp<T>& op, const UncorrelatedBasis<T>& b) {
    std::vector<Element<T>> g;
    g.reserve(b.elements.size());
    for (const auto& x : b.elements) g.push_back(op.companion(x));
    return g;
}

template <class T>
struct BasisReport {
    double max_offdiag = 0;   // largest |cov_p(X_i, X_j)|, relative under Float
    double max_var_error = 0;
    bool pass = true;
};

template <class T>
BasisReport<T> verify_basis(const PCovOp<T>& op, const UncorrelatedBasis<T>& b) {
    BasisReport<T> r;
    const auto n = b.elements.size();
    std::vector<T> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = op.inner(b.elements[i], b.elements[i]);
    for (std::size_t i = 0; i < n; ++i) {
        T v = op.cov(b.elements[i], b.elements[i]);
        if (i < b.variances.size()) {
            double e = to_double(num<T>::abs(T(v - b.variances[i])));
            if constexpr (num<T>::exact) {
                if (v != b.variances[i]) r.pass = false;
            } else {
                e /= std::max(1.0, std::fabs(sq[i]));
                if (e > float_tolerance()) r.pass = false;
            }
            r.max_var_error = std::max(r.max_var_error, e);
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            T c = op.cov(b.elements[i], b.elements[j]);
            double e = std::fabs(to_double(c));
            if constexpr (num<T>::exact) {
                if (c != T(0)) r.pass = false;
            } else {
                e /= std::max(1e-300, std::sqrt(std::fabs(sq[i] * sq[j])));
                if (e > float_tolerance()) r.pass = false;
            }
            r.max_offdiag = std::max(r.max_offdiag, e);
        }
    }
    return r;
}

}  // namespace pvar
