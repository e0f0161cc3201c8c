#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "pvar/approx.hpp"

namespace pvar {

template <class T>
struct PVQuadrature {
    std::vector<T> nodes;
    std::vector<T> weights;

    /// Sum_k w_k f(x_k).
    T apply(const Element<T>& f) const {
        T s(0);
        for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f.eval_exact(nodes[k]);
        return s;
    }
};

namespace detail {

template <class T>
void check_nodes(const std::vector<T>& x) {
    if (x.empty()) throw ConstraintViolation("quadrature needs at least one node");
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            bool same;
            if constexpr (num<T>::exact) {
                same = x[i] == x[j];
            } else {
                same = std::fabs(x[i] - x[j]) <= 1e-14 * std::max({1.0, std::fabs(x[i]), std::fabs(x[j])});
            }
            if (same) throw DuplicateNodes("nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        }
}

}  // namespace detail

/// Bjorck-Pereyra solve of sum_j x_j^i a_j = f_i, i = 0..n-1.
template <class T>
std::vector<T> vandermonde_solve(const std::vector<T>& x, std::vector<T> f) {
    detail::check_nodes(x);
    if (f.size() != x.size()) throw ConstraintViolation("rhs length differs from node count");
    const std::size_t n = x.size() - 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = n; i > k; --i) f[i] -= x[k] * f[i - 1];
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t i = k + 1; i <= n; ++i) f[i] /= x[i] - x[i - k - 1];
        for (std::size_t i = k; i < n; ++i) f[i] -= f[i + 1];
    }
    for (auto& v : f) num<T>::check(v);
    return f;
}

/// Transposed Vandermonde matrix: row i holds x_j^i.
template <class T>
Matrix<T> vandermonde(const std::vector<T>& x) {
    Matrix<T> v = linalg::zeros<T>(x.size(), x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        T pw(1);
        for (std::size_t i = 0; i < x.size(); ++i) {
            v[i][j] = pw;
            pw *= x[j];
        }
    }
    return v;
}

/// Weights from the moment system with right-hand side var_p(x^i), i < n.
/// These reproduce var_p on the monomials themselves only; var_p is
/// quadratic, so linear combinations of monomials are not reproduced.
template <class T>
PVQuadrature<T> pv_quad_weights(const PCovOp<T>& op, const std::vector<T>& nodes) {
    detail::check_nodes(nodes);
    std::vector<T> rhs;
    for (std::size_t i = 0; i < nodes.size(); ++i) rhs.push_back(op.var(Element<T>::monomial(static_cast<long>(i))));
    return {nodes, vandermonde_solve(nodes, std::move(rhs))};
}

/// Weights w_k = cov_p(f, L_k) with L_k the Lagrange basis of the nodes.
/// Solved as the moment system with right-hand side cov_p(f, x^i); exact on
/// every f of degree below the node count.
template <class T>
PVQuadrature<T> pv_quad_weights_for(const PCovOp<T>& op, const std::vector<T>& nodes, const Element<T>& f) {
    detail::check_nodes(nodes);
    std::vector<T> rhs;
    for (std::size_t i = 0; i < nodes.size(); ++i) rhs.push_back(op.cov(f, Element<T>::monomial(static_cast<long>(i))));
    return {nodes, vandermonde_solve(nodes, std::move(rhs))};
}

/// Node polynomial N_n(x) = prod (x - x_k).
template <class T>
Element<T> node_polynomial(const std::vector<T>& nodes) {
    std::vector<T> c{T(1)};
    for (const auto& x : nodes) {
        std::vector<T> next(c.size() + 1, T(0));
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= x * c[i];
        }
        c = std::move(next);
    }
    return Element<T>::poly(c);
}

template <class T>
struct BoundInputs {
    T m_x, M_x, m_y, M_y;
};

template <class T>
struct GrussResult {
    T cov;        // cov_1(X, Y; Z)
    T simple;     // (E(Z^2)/4)(M_X - m_X)(M_Y - m_Y), bounds |cov|
    T product;    // sharper bound on cov^2
    T loose;      // E^2(Z^2)/16 (M_X - m_X)^2 (M_Y - m_Y)^2, bounds product
};

namespace detail {

/// Points at which the envelope m Z <= X <= M Z is checked.
template <class T>
std::vector<double> envelope_grid(const ProbSpace<T>& s) {
    std::vector<double> g;
    if (s.kind() == ProbSpace<T>::Kind::Discrete) {
        for (const auto& x : s.points()) g.push_back(to_double(x));
        return g;
    }
    double a = to_double(s.lower());
    for (int i = 0; i <= 65; ++i) {
        double u = i / 65.0;
        if (s.semi_infinite()) {
            if (i == 65) break;
            g.push_back(a + u / (1 - u));
        } else {
            double b = to_double(s.upper());
            g.push_back(a + u * (b - a));
        }
    }
    return g;
}

template <class T>
std::vector<double> sampled(const ProbSpace<T>& s, const Element<T>& e, const std::vector<double>& grid) {
    std::vector<double> out;
    if (e.is_values()) {
        for (const auto& v : e.value_data()) out.push_back(to_double(v));
        return out;
    }
    if (s.kind() == ProbSpace<T>::Kind::Vectors) throw IncompatibleRepr("vector elements must be tabulated");
    for (double x : grid) out.push_back(e.eval(x));
    return out;
}

template <class T>
void check_envelope(const ProbSpace<T>& s, const Element<T>& x, const Element<T>& z, const T& m, const T& M,
                    const char* which) {
    if (m > M) throw InvalidBounds(std::string("m_") + which + " exceeds M_" + which);
    auto grid = envelope_grid(s);
    auto xv = sampled(s, x, grid), zv = sampled(s, z, grid);
    double lo = to_double(m), hi = to_double(M);
    for (std::size_t i = 0; i < xv.size(); ++i) {
        if (!std::isfinite(xv[i]) || !std::isfinite(zv[i])) continue;
        double tol = 1e-12 * std::max({1.0, std::fabs(xv[i]), std::fabs(hi * zv[i]), std::fabs(lo * zv[i])});
        if (xv[i] < lo * zv[i] - tol || xv[i] > hi * zv[i] + tol)
            throw InvalidBounds(std::string("envelope m Z <= ") + which + " <= M Z fails at sample " + std::to_string(i));
    }
}

}  // namespace detail

/// Gruss-type bounds for cov_1(X, Y; Z). The envelope is verified on a
/// 64-point interior grid plus endpoints, or at the sample points.
template <class T>
GrussResult<T> gruss_bound(const PCovOp<T>& op, const Element<T>& x, const Element<T>& y, const BoundInputs<T>& b) {
    if (op.p() != T(1)) throw ConstraintViolation("the bound holds for p = 1");
    if (op.z().size() != 1) throw ConstraintViolation("the bound needs a single fixed variable");
    const auto& s = op.space();
    const auto& z = op.z().members()[0];
    detail::check_envelope(s, x, z, b.m_x, b.M_x, "X");
    detail::check_envelope(s, y, z, b.m_y, b.M_y, "Y");
    T ez2 = s.expect_product(z, z);
    T exz = s.expect_product(x, z), eyz = s.expect_product(y, z);
    GrussResult<T> r;
    r.cov = op.cov(x, y);
    T dx = b.M_x - b.m_x, dy = b.M_y - b.m_y;
    r.simple = ez2 / T(4) * dx * dy;
    r.product = (b.M_x * ez2 - exz) * (exz - b.m_x * ez2) * (b.M_y * ez2 - eyz) * (eyz - b.m_y * ez2) / (ez2 * ez2);
    r.loose = ez2 * ez2 / T(16) * dx * dx * dy * dy;
    return r;
}

template <class T>
struct BesselTerm {
    T S;     // E((sum alpha_k Phi_k - f)^2)
    T R2;    // p E(Z R)^2 / E(Z^2)
    T V;     // S - R2
    T lhs;   // E(Z^2)E(f^2) - p E(fZ)^2
    T rhs;   // right side of the improved Bessel inequality
};

/// Improved Bessel quantities for each prefix Phi_0..Phi_n, n < phis.size().
/// Inner products are normalized by the space mass.
template <class T>
std::vector<BesselTerm<T>> bessel_improved(const PCovOp<T>& op, const std::vector<Element<T>>& phis, const Element<T>& f) {
    if (phis.empty()) throw ConstraintViolation("empty orthogonal family");
    if (op.z().size() != 1) throw ConstraintViolation("a single fixed variable is required");
    const auto& s = op.space();
    const auto& z = op.z().members()[0];
    const std::size_t n = phis.size();
    std::vector<T> pp(n), fp(n), zp(n);
    for (std::size_t k = 0; k < n; ++k) {
        pp[k] = s.expect_product(phis[k], phis[k]);
        if (!(pp[k] > T(0))) throw NotOrthogonal("Phi_" + std::to_string(k) + " has zero norm");
        fp[k] = s.expect_product(f, phis[k]);
        zp[k] = s.expect_product(z, phis[k]);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            T c = s.expect_product(phis[i], phis[j]);
            bool ok;
            if constexpr (num<T>::exact) {
                ok = c == T(0);
            } else {
                ok = std::fabs(c) <= 1e-9 * std::sqrt(pp[i] * pp[j]);
            }
            if (!ok) throw NotOrthogonal("<Phi_" + std::to_string(i) + ", Phi_" + std::to_string(j) + "> != 0");
        }
    const T p = op.p();
    T zz = s.expect_product(z, z), ff = s.expect_product(f, f), fz = s.expect_product(f, z);
    std::vector<BesselTerm<T>> out;
    Element<T> partial;
    T bessel(0), cross(0);
    for (std::size_t k = 0; k < n; ++k) {
        Element<T> t = phis[k] * T(fp[k] / pp[k]);
        partial = k == 0 ? t : partial + t;
        bessel += fp[k] * fp[k] / pp[k];
        cross += fp[k] * zp[k] / pp[k];
        Element<T> res = partial - f;
        BesselTerm<T> b;
        b.S = s.expect_product(res, res);
        T zr = s.expect_product(z, res);
        b.R2 = p * zr * zr / zz;
        b.V = b.S - b.R2;
        b.lhs = zz * ff - p * fz * fz;
        b.rhs = zz * bessel + p * cross * cross - T(2) * p * fz * cross;
        out.push_back(b);
    }
    return out;
}

template <class T>
struct ParsevalResult {
    T lhs;   // cov_p(f, g)
    T rhs;   // sum cov_p(Phi_k, f) cov_p(Phi_k, g) / var_p(Phi_k)
};

template <class T>
ParsevalResult<T> parseval_p(const PCovOp<T>& op, const UncorrelatedBasis<T>& basis, const Element<T>& f,
                             const Element<T>& g) {
    ParsevalResult<T> r{op.cov(f, g), T(0)};
    for (std::size_t k = 0; k < basis.elements.size(); ++k) {
        const auto& phi = basis.elements[k];
        T v = op.var(phi);
        if (op.is_zero_var(v, phi)) throw DegenerateVariance("var_p(Phi_" + std::to_string(k) + ") = 0");
        r.rhs += op.cov(phi, f) * op.cov(phi, g) / v;
    }
    return r;
}

}  // namespace pvar
