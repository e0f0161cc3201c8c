#pragma once

#include <vector>

#include "pvar/scalar.hpp"

namespace pvar::poly {

/// Polynomials as ascending coefficient vectors.
template <class T>
using Coeffs = std::vector<T>;

template <class T>
void trim(Coeffs<T>& p) {
    while (!p.empty() && p.back() == T(0)) p.pop_back();
}

template <class T, class X>
X eval(const Coeffs<T>& p, const X& x) {
    X s(0);
    for (std::size_t k = p.size(); k-- > 0;) s = s * x + X(p[k]);
    return s;
}

template <class T>
Coeffs<T> add(Coeffs<T> a, const Coeffs<T>& b, const T& s = T(1)) {
    if (a.size() < b.size()) a.resize(b.size(), T(0));
    for (std::size_t k = 0; k < b.size(); ++k) a[k] += s * b[k];
    trim(a);
    return a;
}

template <class T>
Coeffs<T> scale(Coeffs<T> a, const T& s) {
    for (auto& c : a) c *= s;
    trim(a);
    return a;
}

template <class T>
Coeffs<T> mul(const Coeffs<T>& a, const Coeffs<T>& b) {
    if (a.empty() || b.empty()) return {};
    Coeffs<T> r(a.size() + b.size() - 1, T(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

/// (x - s) p(x).
template <class T>
Coeffs<T> mul_linear(const Coeffs<T>& p, const T& s) {
    return mul(p, Coeffs<T>{T(-s), T(1)});
}

/// p(u + v x).
template <class T>
Coeffs<T> compose_affine(const Coeffs<T>& p, const T& u, const T& v) {
    Coeffs<T> r;
    for (std::size_t k = p.size(); k-- > 0;) {
        r = mul(r, Coeffs<T>{u, v});
        r = add(r, Coeffs<T>{p[k]});
    }
    return r;
}

/// (p(x) - p(lam)) / (x - lam) by synthetic division.
template <class T>
Coeffs<T> divided_difference(const Coeffs<T>& p, const T& lam) {
    if (p.size() <= 1) return {};
    const std::size_t n = p.size() - 1;
    Coeffs<T> q(n, T(0));
    T carry(0);
    for (std::size_t k = n; k >= 1; --k) {
        carry = carry * lam + p[k];
        q[k - 1] = carry;
    }
    trim(q);
    return q;
}

}  // namespace pvar::poly
