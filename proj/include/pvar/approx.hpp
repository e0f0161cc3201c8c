#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pvar/uncorrelate.hpp"

namespace pvar {

template <class T>
struct FitResult {
    std::vector<T> coefficients;
    T residual_var_p{0};
    T residual_ls{0};               // plain E[R^2]
    std::string basis_used = "raw";
    std::vector<std::size_t> degenerate_free_params;
    Element<T> approximant;
};

/// Matrix cov_p(X_i, X_j) and right-hand side cov_p(X_i, Y).
template <class T>
std::pair<Matrix<T>, std::vector<T>> assemble_system(const PCovOp<T>& op, const std::vector<Element<T>>& basis,
                                                     const Element<T>& target) {
    Matrix<T> m = cov_matrix(op, basis, basis.size());
    std::vector<T> rhs;
    rhs.reserve(basis.size());
    for (const auto& x : basis) rhs.push_back(op.cov(x, target));
    return {std::move(m), std::move(rhs)};
}

namespace detail {

template <class T>
Element<T> combine(const PCovOp<T>& op, const std::vector<Element<T>>& basis, const std::vector<T>& c) {
    Element<T> a;
    bool first = true;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        Element<T> t = basis[k] * c[k];
        if (op.space().kind() != ProbSpace<T>::Kind::Continuous) t = op.space().materialize(t);
        a = first ? t : a + t;
        first = false;
    }
    return a;
}

template <class T>
void fill_residuals(const PCovOp<T>& op, const std::vector<Element<T>>& basis, const Element<T>& target,
                    FitResult<T>& r) {
    r.approximant = combine(op, basis, r.coefficients);
    Element<T> y = op.space().kind() != ProbSpace<T>::Kind::Continuous ? op.space().materialize(target) : target;
    Element<T> res = y - r.approximant;
    r.residual_var_p = op.var(res);
    r.residual_ls = op.inner(res, res);
}

}  // namespace detail

/// Least p-variance fit of target on the span of basis.
///
/// A singular system with consistent right-hand side means some direction
/// leaves var_p unchanged. That direction is fixed by also asking
/// E(R Z_k) = 0, which for Z constant and X_0 = 1 is the rule
/// c_0 = E(Y) - sum_k c_k E(X_k). Remaining freedom is set to 0.
template <class T>
FitResult<T> fit(const PCovOp<T>& op, const std::vector<Element<T>>& basis, const Element<T>& target) {
    auto [m, rhs] = assemble_system(op, basis, target);
    FitResult<T> r;
    try {
        r.coefficients = linalg::solve_full_pivot(m, rhs);
    } catch (const RankDeficient&) {
        auto gen = linalg::solve_general(m, rhs);
        if (!gen.consistent) throw InconsistentSystem("p-covariance system is singular and inconsistent");
        r.degenerate_free_params = gen.free;
        Matrix<T> aug = m;
        std::vector<T> brhs = rhs;
        for (std::size_t k = 0; k < op.z().size(); ++k) {
            std::vector<T> row;
            for (const auto& x : basis) row.push_back(op.inner(x, op.z().members()[k]));
            aug.push_back(std::move(row));
            brhs.push_back(op.inner(target, op.z().members()[k]));
        }
        auto fixed = linalg::solve_general(aug, brhs);
        r.coefficients = fixed.consistent ? fixed.x : gen.x;
    }
    detail::fill_residuals(op, basis, target, r);
    return r;
}

/// Expansion on a p-uncorrelated basis: c_k = cov_p(X_k, Y)/var_p(X_k), k <= n.
template <class T>
FitResult<T> expand(const PCovOp<T>& op, const UncorrelatedBasis<T>& b, const Element<T>& target, long n) {
    if (n < 0 || static_cast<std::size_t>(n) >= b.elements.size()) throw ConstraintViolation("expansion order out of range");
    FitResult<T> r;
    r.basis_used = "uncorrelated";
    std::vector<Element<T>> used(b.elements.begin(), b.elements.begin() + n + 1);
    for (long k = 0; k <= n; ++k) {
        if (op.is_zero_var(b.variances[k], b.elements[k]))
            throw DegenerateVariance("var_p(X_" + std::to_string(k) + ") = 0");
        r.coefficients.push_back(op.cov(b.elements[k], target) / b.variances[k]);
    }
    detail::fill_residuals(op, used, target, r);
    return r;
}

template <class T>
struct ResidualIdentity {
    T lhs;          // var_p(Y - sum c_k X_k)
    T rhs;          // var_p(Y) - sum cov_p(X_k, Y)^2 / var_p(X_k)
    T rho_sq_sum;   // sum rho_p(X_k, Y)^2, at most 1
};

template <class T>
ResidualIdentity<T> residual_identity_check(const PCovOp<T>& op, const UncorrelatedBasis<T>& b, const Element<T>& target,
                                            long n) {
    FitResult<T> f = expand(op, b, target, n);
    T vy = op.var(target);
    T rhs = vy, rho(0);
    for (long k = 0; k <= n; ++k) {
        T c = op.cov(b.elements[k], target);
        rhs -= c * c / b.variances[k];
        if (vy != T(0)) rho += c * c / (b.variances[k] * vy);
    }
    return {f.residual_var_p, rhs, rho};
}

/// x * e, for analytic elements or tabulated ones on a discrete space.
template <class T>
Element<T> multiply_x(const ProbSpace<T>& s, const Element<T>& e) {
    if (!e.is_values()) return times_x(e);
    if (s.kind() != ProbSpace<T>::Kind::Discrete) throw IncompatibleRepr("x is undefined on this space");
    return e * Element<T>::values(s.points());
}

/// Coefficients of x P_n in the basis P_0..P_{n+1}.
template <class T>
std::vector<T> recurrence_coeffs(const PCovOp<T>& op, const UncorrelatedBasis<T>& pups, long n) {
    if (n < 0 || static_cast<std::size_t>(n + 1) >= pups.elements.size())
        throw ConstraintViolation("recurrence needs P_0..P_{n+1}");
    Element<T> xp = multiply_x(op.space(), pups.elements[n]);
    std::vector<T> out;
    for (long k = 0; k <= n + 1; ++k) {
        if (op.is_zero_var(pups.variances[k], pups.elements[k]))
            throw DegenerateVariance("var_p(P_" + std::to_string(k) + ") = 0");
        out.push_back(op.cov(xp, pups.elements[k]) / pups.variances[k]);
    }
    return out;
}

}  // namespace pvar
