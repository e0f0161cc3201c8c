#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pvar/pcov.hpp"
#include "pvar/poly.hpp"

namespace pvar {

/// Terminating generalized hypergeometric series pFq(upper; lower | x).
template <class T>
struct HypTerminating {
    std::vector<T> upper, lower;
    long n = 0;

    /// Degree is fixed by the first nonpositive integer among the upper parameters.
    static HypTerminating make(std::vector<T> upper, std::vector<T> lower) {
        HypTerminating h{std::move(upper), std::move(lower), 0};
        std::optional<long> deg;
        for (const auto& a : h.upper)
            if (num<T>::is_integer(a) && a <= T(0)) {
                long d = -num<T>::to_long(a);
                if (!deg || d < *deg) deg = d;
            }
        if (!deg && !h.upper.empty()) throw ConstraintViolation("hypergeometric series does not terminate");
        h.n = deg.value_or(0);
        return h;
    }
};

/// u_k = prod (a_i)_k / (prod (b_j)_k k!), k = 0..n.
template <class T>
std::vector<T> hyp_coeffs(const HypTerminating<T>& h) {
    std::vector<T> u{T(1)};
    for (long k = 0; k < h.n; ++k) {
        T num_(1), den(static_cast<long>(k + 1));
        for (const auto& a : h.upper) num_ *= a + T(k);
        for (const auto& b : h.lower) {
            T f = b + T(k);
            if (f == T(0)) throw PoleInLowerParams("lower parameter " + num<T>::str(b) + " hits zero at k = " + std::to_string(k + 1));
            den *= f;
        }
        u.push_back(u.back() * num_ / den);
    }
    return u;
}

template <class T>
T hyp_eval(const HypTerminating<T>& h, const T& x) {
    return poly::eval(hyp_coeffs(h), x);
}

/// Value at x = 1 by direct summation.
template <class T>
T hyp_sum_at_one(const HypTerminating<T>& h) {
    T s(0);
    for (const auto& u : hyp_coeffs(h)) s += u;
    return s;
}

/// Monic classical family with P_{n+1} = (x - B_n) P_n - C_n P_{n-1}.
template <class T>
struct ClassicalBase {
    enum class Kind { Jacobi, Laguerre };
    Kind kind = Kind::Jacobi;
    T alpha{0}, beta{0};

    static ClassicalBase jacobi(const T& a, const T& b) {
        if (a <= T(-1) || b <= T(-1)) throw ConstraintViolation("Jacobi parameters must exceed -1");
        return {Kind::Jacobi, a, b};
    }
    static ClassicalBase laguerre(const T& a) {
        if (a <= T(-1)) throw ConstraintViolation("Laguerre parameter must exceed -1");
        return {Kind::Laguerre, a, T(0)};
    }

    T B(long n) const {
        if (kind == Kind::Laguerre) return T(2 * n + 1) + alpha;
        if (n == 0) return (beta - alpha) / (alpha + beta + T(2));
        T s = T(2 * n) + alpha + beta;
        return (beta * beta - alpha * alpha) / (s * (s + T(2)));
    }

    T C(long n) const {
        if (n <= 0) return T(0);
        if (kind == Kind::Laguerre) return T(n) * (T(n) + alpha);
        T ab = alpha + beta;
        if (n == 1) return T(4) * (alpha + T(1)) * (beta + T(1)) / ((ab + T(3)) * (ab + T(2)) * (ab + T(2)));
        T s = T(2 * n) + ab;
        return T(4 * n) * (T(n) + alpha) * (T(n) + beta) * (T(n) + ab) / ((s + T(1)) * s * s * (s - T(1)));
    }

    /// Monic P_n by the three-term recurrence.
    poly::Coeffs<T> monic(long n) const {
        poly::Coeffs<T> prev, cur{T(1)};
        for (long k = 0; k < n; ++k) {
            auto next = poly::add(poly::mul_linear(cur, B(k)), prev, T(-C(k)));
            prev = std::move(cur);
            cur = std::move(next);
        }
        return cur;
    }

    /// The orthogonality space of the base family.
    ProbSpace<T> space() const {
        return kind == Kind::Jacobi ? ProbSpace<T>::jacobi(alpha, beta) : ProbSpace<T>::gamma(alpha, T(1));
    }

    std::string name() const {
        return kind == Kind::Jacobi ? "Jacobi(" + num<T>::str(alpha) + "," + num<T>::str(beta) + ")"
                                    : "Laguerre(" + num<T>::str(alpha) + ")";
    }
};

/// Monic Jacobi polynomial from its 2F1 form in (1-x)/2.
template <class T>
poly::Coeffs<T> jacobi_monic_hyp(const T& a, const T& b, long n) {
    auto h = HypTerminating<T>::make({T(-n), T(n) + a + b + T(1)}, {a + T(1)});
    T pre = pow_int(T(2), n) * pochhammer(T(a + T(1)), n) / pochhammer(T(T(n) + a + b + T(1)), n);
    const T half = num<T>::from_ratio(1, 2);
    return poly::scale(poly::compose_affine(hyp_coeffs(h), half, T(-half)), pre);
}

/// Q_n(x; lam) = (P_{n+1}(x) - P_{n+1}(lam)) / (x - lam) by synthetic division.
template <class T>
poly::Coeffs<T> divided_difference(const ClassicalBase<T>& base, const T& lam, long n) {
    return poly::divided_difference(base.monic(n + 1), lam);
}

/// Q_0..Q_{n_max} from Q_{n+1} = (x - B_{n+1}) Q_n - C_{n+1} Q_{n-1} + P_{n+1}(lam).
template <class T>
std::vector<poly::Coeffs<T>> divided_difference_recurrence(const ClassicalBase<T>& base, const T& lam, long n_max) {
    std::vector<poly::Coeffs<T>> q{{T(1)}};
    poly::Coeffs<T> prev;
    for (long n = 0; n < n_max; ++n) {
        auto next = poly::add(poly::mul_linear(q[n], base.B(n + 1)), prev, T(-base.C(n + 1)));
        next = poly::add(next, poly::Coeffs<T>{poly::eval(base.monic(n + 1), lam)});
        prev = q[n];
        q.push_back(std::move(next));
    }
    return q;
}

namespace detail {

template <class T>
poly::Coeffs<T> derivative(const poly::Coeffs<T>& p) {
    poly::Coeffs<T> d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(p[k] * T(static_cast<long>(k)));
    return d;
}

/// (p(x) - p(t)) / (x - t), with the derivative on the diagonal.
template <class T>
T pair_difference(const poly::Coeffs<T>& p, const T& x, const T& t) {
    if (x == t) return poly::eval(derivative(p), x);
    return (poly::eval(p, x) - poly::eval(p, t)) / (x - t);
}

}  // namespace detail

/// Both sides of the Christoffel-Darboux analogue for Q_n(x; lam).
template <class T>
std::pair<T, T> christoffel_darboux_check(const ClassicalBase<T>& base, const T& lam, long m, const T& x, const T& t) {
    if (m < 0) throw ConstraintViolation("m must be nonnegative");
    T lhs(0), prod(1);
    for (long n = 0; n <= m; ++n) {
        prod *= base.C(n + 1);
        auto q = divided_difference(base, lam, n);
        T pl = poly::eval(base.monic(n + 1), lam);
        lhs += (poly::eval(q, x) * poly::eval(q, t) - pl * detail::pair_difference(q, x, t)) / prod;
    }
    auto q0 = divided_difference(base, lam, m), q1 = divided_difference(base, lam, m + 1);
    T rhs;
    if (x == t) {
        rhs = poly::eval(detail::derivative(q1), x) * poly::eval(q0, x) -
              poly::eval(q1, x) * poly::eval(detail::derivative(q0), x);
    } else {
        rhs = (poly::eval(q1, x) * poly::eval(q0, t) - poly::eval(q1, t) * poly::eval(q0, x)) / (x - t);
    }
    return {lhs, rhs / prod};
}

/// E_w[(x - lam) Q_n P_m] against E_w[P_{n+1} P_m] - P_{n+1}(lam) E_w[P_m], normalized by the base weight.
template <class T>
std::pair<T, T> biorthogonality(const ClassicalBase<T>& base, const T& lam, long n, long m) {
    auto s = base.space();
    auto q = Element<T>::poly(divided_difference(base, lam, n));
    auto pm = Element<T>::poly(base.monic(m));
    auto pn1 = base.monic(n + 1);
    T lhs = s.expect(Element<T>::poly({T(-lam), T(1)}) * q * pm);
    T rhs = s.expect(Element<T>::poly(pn1) * pm) - poly::eval(pn1, lam) * s.expect(pm);
    return {lhs, rhs};
}

enum class Family { BetaUnified, BetaPower, BetaOrdinary, JacobiDivided, ChebyshevDivided, LaguerreDivided, ChebyshevShift };

/// One explicit p-uncorrelated family and its parameters.
///   BetaUnified(a, c)     w = x^a on [0,1], Z = x^{c-a}
///   BetaPower(r)          BetaUnified(0, r)
///   BetaOrdinary(r)       x^r Q_n with Q_n = BetaUnified(2r, r); w = 1, Z = 1
///   JacobiDivided         w = (1-x)^{al+2}(1+x)^be, Z = 1/(1-x) at endpoint 1 (mirrored at -1)
///   ChebyshevDivided(k)   JacobiDivided at 1 with the kind's (al, be)
///   LaguerreDivided(al)   w = x^{al+2} e^{-x}, Z = 1/x
///   ChebyshevShift(lam)   (T_{n+1}(x) - T_{n+1}(lam))/(x - lam), w = (x-lam)^2/sqrt(1-x^2), Z = 1/(x-lam)
template <class T>
struct FamilyDescriptor {
    Family family = Family::BetaUnified;
    T a{0}, c{0};
    T alpha{0}, beta{0};
    int endpoint = 1;
    int kind = 1;
    T lambda{0};

    static FamilyDescriptor beta_unified(const T& a, const T& c) { return checked({Family::BetaUnified, a, c}); }
    static FamilyDescriptor beta_power(const T& r) { return checked({Family::BetaPower, T(0), r}); }
    static FamilyDescriptor beta_ordinary(const T& r) { return checked({Family::BetaOrdinary, T(2) * r, r}); }
    static FamilyDescriptor jacobi_divided(const T& al, const T& be, int endpoint) {
        FamilyDescriptor d{Family::JacobiDivided};
        d.alpha = al, d.beta = be, d.endpoint = endpoint;
        return checked(d);
    }
    static FamilyDescriptor chebyshev_divided(int kind) {
        FamilyDescriptor d{Family::ChebyshevDivided};
        d.kind = kind;
        const T h = num<T>::from_ratio(1, 2);
        switch (kind) {
            case 1: d.alpha = -h, d.beta = -h; break;
            case 2: d.alpha = h, d.beta = h; break;
            case 3: d.alpha = -h, d.beta = h; break;
            case 4: d.alpha = h, d.beta = -h; break;
            default: throw ConstraintViolation("Chebyshev kind must be 1..4");
        }
        return checked(d);
    }
    static FamilyDescriptor laguerre_divided(const T& al) {
        FamilyDescriptor d{Family::LaguerreDivided};
        d.alpha = al;
        return checked(d);
    }
    static FamilyDescriptor chebyshev_shift(const T& lam) {
        FamilyDescriptor d{Family::ChebyshevShift};
        d.lambda = lam;
        return checked(d);
    }

    T r() const { return c; }
    bool is_beta() const {
        return family == Family::BetaUnified || family == Family::BetaPower || family == Family::BetaOrdinary;
    }

    void validate() const {
        switch (family) {
            case Family::BetaUnified:
                if (!(a > T(-1) && c > T(-1))) throw ConstraintViolation("BetaUnified needs a, c > -1");
                if (a == c) throw ConstraintViolation("BetaUnified needs a != c");
                if (!(T(2) * c - a + T(1) > T(0))) throw ConstraintViolation("BetaUnified needs 2c - a + 1 > 0");
                break;
            case Family::BetaPower:
                if (!(c > num<T>::from_ratio(-1, 2))) throw ConstraintViolation("BetaPower needs r > -1/2");
                if (c == T(0)) throw ConstraintViolation("BetaPower needs r != 0");
                break;
            case Family::BetaOrdinary:
                if (!(c > num<T>::from_ratio(-1, 2))) throw ConstraintViolation("BetaOrdinary needs r > -1/2");
                if (c == T(0)) throw ConstraintViolation("BetaOrdinary needs r != 0");
                break;
            case Family::JacobiDivided:
            case Family::ChebyshevDivided:
                if (!(alpha > T(-1) && beta > T(-1))) throw ConstraintViolation("Jacobi parameters must exceed -1");
                if (endpoint != 1 && endpoint != -1) throw ConstraintViolation("endpoint must be 1 or -1");
                break;
            case Family::LaguerreDivided:
                if (!(alpha > T(-1))) throw ConstraintViolation("Laguerre parameter must exceed -1");
                break;
            case Family::ChebyshevShift:
                if (lambda < T(-1) || lambda > T(1)) throw ConstraintViolation("lambda must lie in [-1, 1]");
                break;
        }
    }

    /// Last valid degree of a finite family, if any.
    std::optional<long> max_degree() const {
        if (is_beta() && family != Family::BetaOrdinary) {
            T d = c - a;
            if (num<T>::is_integer(d) && d >= T(1)) return num<T>::to_long(d) - 1;
        }
        return std::nullopt;
    }

    std::string name() const {
        switch (family) {
            case Family::BetaUnified: return "BetaUnified(" + num<T>::str(a) + "," + num<T>::str(c) + ")";
            case Family::BetaPower: return "BetaPower(" + num<T>::str(c) + ")";
            case Family::BetaOrdinary: return "BetaOrdinary(" + num<T>::str(c) + ")";
            case Family::JacobiDivided:
                return "JacobiDivided(" + num<T>::str(alpha) + "," + num<T>::str(beta) + "," + std::to_string(endpoint) + ")";
            case Family::ChebyshevDivided: return "ChebyshevDivided(" + std::to_string(kind) + ")";
            case Family::LaguerreDivided: return "LaguerreDivided(" + num<T>::str(alpha) + ")";
            case Family::ChebyshevShift: return "ChebyshevShift(" + num<T>::str(lambda) + ")";
        }
        return "?";
    }

private:
    static FamilyDescriptor checked(FamilyDescriptor d) {
        d.validate();
        return d;
    }
};

/// 4F3(-n, n+a+1, a-c, c+2; a+1, a-c+1, c+1 | x), without family constraints.
template <class T>
HypTerminating<T> beta_unified_hyp(const T& a, const T& c, long n) {
    return HypTerminating<T>::make({T(-n), T(n) + a + T(1), a - c, c + T(2)}, {a + T(1), a - c + T(1), c + T(1)});
}

/// (n+1) 2^n (al+2)_n/(n+al+be+3)_n 3F2(-n, n+al+be+3, 1; al+2, 2 | (1-x)/2).
template <class T>
poly::Coeffs<T> jacobi_divided_hyp(const T& al, const T& be, long n) {
    auto h = HypTerminating<T>::make({T(-n), T(n) + al + be + T(3), T(1)}, {al + T(2), T(2)});
    T pre = T(n + 1) * pow_int(T(2), n) * pochhammer(T(al + T(2)), n) / pochhammer(T(T(n) + al + be + T(3)), n);
    const T half = num<T>::from_ratio(1, 2);
    return poly::scale(poly::compose_affine(hyp_coeffs(h), half, T(-half)), pre);
}

/// (-1)^n (n+1) (al+2)_n 2F2(-n, 1; al+2, 2 | x).
template <class T>
poly::Coeffs<T> laguerre_divided_hyp(const T& al, long n) {
    auto h = HypTerminating<T>::make({T(-n), T(1)}, {al + T(2), T(2)});
    T pre = T(n + 1) * pochhammer(T(al + T(2)), n);
    if (n % 2) pre = -pre;
    return poly::scale(hyp_coeffs(h), pre);
}

/// p(x) -> (-1)^n p(-x) for degree-n p.
template <class T>
poly::Coeffs<T> reflect(poly::Coeffs<T> p, long n) {
    for (std::size_t k = 0; k < p.size(); ++k)
        if ((static_cast<long>(k) + n) % 2) p[k] = -p[k];
    return p;
}

/// Polynomial part of the n-th member as coefficients (for BetaOrdinary, the factor Q_n).
template <class T>
poly::Coeffs<T> family_coeffs(const FamilyDescriptor<T>& d, long n) {
    d.validate();
    if (n < 0) throw ConstraintViolation("degree must be nonnegative");
    const T h = num<T>::from_ratio(1, 2);
    switch (d.family) {
        case Family::BetaUnified:
        case Family::BetaPower:
        case Family::BetaOrdinary: return hyp_coeffs(beta_unified_hyp(d.a, d.c, n));
        case Family::JacobiDivided:
        case Family::ChebyshevDivided:
            if (d.endpoint == 1) return jacobi_divided_hyp(d.alpha, d.beta, n);
            return reflect(jacobi_divided_hyp(d.beta, d.alpha, n), n);
        case Family::LaguerreDivided: return laguerre_divided_hyp(d.alpha, n);
        case Family::ChebyshevShift:
            return poly::scale(divided_difference(ClassicalBase<T>::jacobi(-h, -h), d.lambda, n), pow_int(T(2), n));
    }
    return {};
}

/// The n-th family member as an element.
template <class T>
Element<T> family_poly(const FamilyDescriptor<T>& d, long n) {
    auto co = family_coeffs(d, n);
    if (d.family != Family::BetaOrdinary) return Element<T>::poly(co);
    Element<T> e;
    for (std::size_t k = 0; k < co.size(); ++k) e += Element<T>::term(co[k], d.r() + T(static_cast<long>(k)), T(0), T(0));
    return e;
}

/// Jacobi-divided var_1 (normalized weight), endpoint 1.
template <class T>
T jacobi_divided_norm(const T& al, const T& be, long n) {
    return factorial<T>(n + 1) * pow_int(T(4), n) * pochhammer(T(al + T(3)), n - 1) * pochhammer(T(be + T(1)), n + 1) /
           (pochhammer(T(T(n) + al + be + T(2)), n + 1) * pochhammer(T(al + be + T(4)), 2 * n));
}

/// Closed-form var_1 of the n-th member under the normalized weight of family_op.
template <class T>
T family_norm(const FamilyDescriptor<T>& d, long n) {
    d.validate();
    if (n < 0) throw ConstraintViolation("degree must be nonnegative");
    if (auto m = d.max_degree(); m && n > *m)
        throw PoleInLowerParams("finite family ends at degree " + std::to_string(*m));
    switch (d.family) {
        case Family::BetaUnified:
        case Family::BetaPower: {
            T f = (d.a - d.c) * factorial<T>(n) / ((d.c + T(1)) * pochhammer(T(d.a + T(1)), n));
            return (d.a + T(1)) * f * f / (T(2 * n + 1) + d.a);
        }
        case Family::BetaOrdinary: {
            T r = d.r();
            T f = r * factorial<T>(n) / ((r + T(1)) * pochhammer(T(T(2) * r + T(1)), n));
            return f * f / (T(2 * n + 1) + T(2) * r);
        }
        case Family::JacobiDivided:
        case Family::ChebyshevDivided:
            return d.endpoint == 1 ? jacobi_divided_norm(d.alpha, d.beta, n) : jacobi_divided_norm(d.beta, d.alpha, n);
        case Family::LaguerreDivided: return factorial<T>(n + 1) * pochhammer(T(d.alpha + T(3)), n - 1);
        case Family::ChebyshevShift: return T(1) / (T(1) + T(2) * d.lambda * d.lambda);
    }
    return T(0);
}

namespace detail {

/// Base weight times (x - lam)^2 with Z = 1/(x - lam). Both factors use the same
/// rounded difference so their product stays accurate near lam.
inline PCovOp<double> shifted_op(const ProbSpace<double>& base, double lam) {
    auto tilt = Element<double>::callable([lam](double x) { double d = x - lam; return d * d; }, "(x-lambda)^2");
    auto z = Element<double>::callable([lam](double x) { double d = x - lam; return d == 0 ? 0.0 : 1.0 / d; }, "1/(x-lambda)");
    return PCovOp<double>(ProbSpace<double>::tilted(base, tilt), z, 1.0);
}

}  // namespace detail

/// The (space, Z, p = 1) under which the family is uncorrelated.
template <class T>
PCovOp<T> family_op(const FamilyDescriptor<T>& d) {
    d.validate();
    const T one(1);
    switch (d.family) {
        case Family::BetaUnified:
        case Family::BetaPower: {
            auto s = d.a == T(0) ? ProbSpace<T>::uniform01() : ProbSpace<T>::beta(d.a, T(0));
            return PCovOp<T>(s, Element<T>::power(d.c - d.a), one);
        }
        case Family::BetaOrdinary: return PCovOp<T>(ProbSpace<T>::uniform01(), Element<T>::constant(one), one);
        case Family::JacobiDivided:
        case Family::ChebyshevDivided:
            if (d.endpoint == 1)
                return PCovOp<T>(ProbSpace<T>::jacobi(d.alpha + T(2), d.beta), Element<T>::power_product(T(0), T(-1)), one);
            if constexpr (num<T>::exact) {
                throw NotExact("1/(1+x) has no exact moments here; use the mirrored family at endpoint 1");
            } else {
                return detail::shifted_op(ProbSpace<T>::jacobi(d.alpha, d.beta), -1.0);
            }
        case Family::LaguerreDivided:
            return PCovOp<T>(ProbSpace<T>::gamma(d.alpha + T(2), one), Element<T>::power(T(-1)), one);
        case Family::ChebyshevShift:
            if constexpr (num<T>::exact) {
                throw NotExact("ChebyshevShift uses 1/(x - lambda), available under the Float backend");
            } else {
                const T h = num<T>::from_ratio(1, 2);
                return detail::shifted_op(ProbSpace<T>::jacobi(-h, -h), d.lambda);
            }
    }
    throw ConstraintViolation("unknown family");
}

/// Closed-form orthogonal companion G_n = P_n - proj coefficient * x^{c-a} (BetaUnified and BetaPower).
template <class T>
Element<T> family_companion(const FamilyDescriptor<T>& d, long n) {
    if (d.family != Family::BetaUnified && d.family != Family::BetaPower)
        throw ConstraintViolation("closed-form companion exists for BetaUnified and BetaPower");
    Element<T> p = family_poly(d, n);
    const T& a = d.a;
    const T& c = d.c;
    T ratio = factorial<T>(n) * pochhammer(T(c + T(1)), n) / (pochhammer(T(a + T(1)), n) * pochhammer(T(a + T(1) - c), n));
    T coef = (T(2) * c - a + T(1)) / (c + T(1)) * ratio;
    return p - Element<T>::power(c - a) * coef;
}

/// Left side of the terminating sum identity: sum_{k=m}^{n} (n+2r+1)_k (-n)_k/(m+2r+2)_k (-k)_m/k!.
template <class T>
T sum_identity_lhs(long n, long m, const T& r) {
    T s(0);
    for (long k = m; k <= n; ++k)
        s += pochhammer(T(T(n + 1) + T(2) * r), k) * pochhammer(T(-n), k) / pochhammer(T(T(m + 2) + T(2) * r), k) *
             pochhammer(T(-k), m) / factorial<T>(k);
    return s;
}

template <class T>
T sum_identity_rhs(long n, long m, const T& r) {
    if (n != m) return T(0);
    return factorial<T>(n) * (T(n + 1) + T(2) * r) / (T(2 * n + 1) + T(2) * r);
}

namespace detail {

template <class T>
const T& nonzero(const T& v) {
    if (v == T(0)) throw DivergentMoment("closed form has a removable singularity here");
    return v;
}

}  // namespace detail

/// 5F4(-m, m+1, -r, r+2, k+1; 1, 1-r, r+1, k+2 | 1).
template <class T>
HypTerminating<T> hyp_power(const T& r, long k, long m) {
    return HypTerminating<T>::make({T(-m), T(m + 1), T(-r), r + T(2), T(k + 1)}, {T(1), T(1) - r, r + T(1), T(k + 2)});
}

template <class T>
T hyp_power_closed(const T& r, long k, long m) {
    T first = (T(2) * r + T(1)) * (T(m) + r) * pochhammer(r, m) /
              detail::nonzero(T((T(m) - r) * pochhammer(T(-r), m)));
    // k / ((k+m+1)(k+m)(k)_m) = 1 / ((k+1)(k+2)_m), which stays finite at k = 0
    T second = r * (T(k) - r) * pochhammer(T(-k), m) / (T(k + 1) * pochhammer(T(k + 2), m));
    return -T(k + 1) / detail::nonzero(T((T(k + 1) + r) * (r + T(1)))) * (first + second);
}

/// 5F4(-m, m+2r+1, r, r+2, 2r+1+k; 2r+1, r+1, r+1, 2r+2+k | 1).
template <class T>
HypTerminating<T> hyp_ordinary(const T& r, long k, long m) {
    T r2 = T(2) * r;
    return HypTerminating<T>::make({T(-m), T(m + 1) + r2, r, r + T(2), r2 + T(1 + k)},
                                   {r2 + T(1), r + T(1), r + T(1), r2 + T(2 + k)});
}

template <class T>
T hyp_ordinary_closed(const T& r, long k, long m) {
    T r2 = T(2) * r;
    T inner = r2 + T(1 + k) + r * (r + T(k)) * pochhammer(T(-k), m) / pochhammer(T(r2 + T(2 + k)), m);
    return factorial<T>(m) / ((r + T(1)) * (r + T(1 + k)) * pochhammer(T(r2 + T(1)), m)) * inner;
}

/// 5F4(-m, m+a+1, a-c, c+2, a+1+k; a+1, a-c+1, c+1, a+2+k | 1).
template <class T>
HypTerminating<T> hyp_unified(const T& a, const T& c, long k, long m) {
    return HypTerminating<T>::make({T(-m), T(m + 1) + a, a - c, c + T(2), a + T(1 + k)},
                                   {a + T(1), a - c + T(1), c + T(1), a + T(2 + k)});
}

template <class T>
T hyp_unified_closed(const T& a, const T& c, long k, long m) {
    T first = (T(2) * c - a + T(1)) * (a + T(1 + k)) * pochhammer(T(c + T(1)), m) /
              detail::nonzero(pochhammer(T(a + T(1) - c), m));
    T second = (a - c) * (a - c + T(k)) * pochhammer(T(-k), m) / pochhammer(T(a + T(2 + k)), m);
    return factorial<T>(m) / ((c + T(1)) * (c + T(1 + k)) * pochhammer(T(a + T(1)), m)) * (first + second);
}

struct IdentityReport {
    long checks = 0;
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
};

namespace detail {

template <class T>
bool same(const T& x, const T& y) {
    if constexpr (num<T>::exact) {
        return x == y;
    } else {
        return std::fabs(x - y) <= 1e-9 * std::max({1.0, std::fabs(x), std::fabs(y)});
    }
}

template <class T>
void expect_same(IdentityReport& rep, const T& x, const T& y, const std::string& what) {
    ++rep.checks;
    if (!same(x, y)) rep.failures.push_back(what + ": " + num<T>::str(x) + " != " + num<T>::str(y));
}

}  // namespace detail

/// Exact identity checks for one family, degrees n <= n_max and secondary index m <= m_max.
template <class T>
IdentityReport identity_suite(const FamilyDescriptor<T>& d, long n_max, long m_max) {
    d.validate();
    IdentityReport rep;
    long top = n_max;
    if (auto md = d.max_degree()) top = std::min(top, *md);
    if (d.is_beta()) {
        const T r = d.a / T(2);
        for (long n = 0; n <= n_max; ++n)
            for (long m = 0; m <= std::min(n_max, m_max); ++m)
                detail::expect_same(rep, sum_identity_lhs(n, m, r), sum_identity_rhs(n, m, r),
                                    "sum identity n=" + std::to_string(n) + " m=" + std::to_string(m));
        for (long m = 0; m <= top; ++m)
            for (long k = 0; k <= m_max; ++k) {
                std::string tag = " m=" + std::to_string(m) + " k=" + std::to_string(k);
                try {
                    if (d.family == Family::BetaPower)
                        detail::expect_same(rep, hyp_sum_at_one(hyp_power(d.c, k, m)), hyp_power_closed(d.c, k, m),
                                            "5F4 power" + tag);
                    if (d.family == Family::BetaOrdinary)
                        detail::expect_same(rep, hyp_sum_at_one(hyp_ordinary(d.c, k, m)), hyp_ordinary_closed(d.c, k, m),
                                            "5F4 ordinary" + tag);
                    detail::expect_same(rep, hyp_sum_at_one(hyp_unified(d.a, d.c, k, m)), hyp_unified_closed(d.a, d.c, k, m),
                                        "5F4 unified" + tag);
                } catch (const DivergentMoment&) {
                    // closed form has a removable singularity at this (m, k)
                } catch (const PoleInLowerParams&) {
                    // past the end of a finite family
                }
            }
    } else if (d.family != Family::ChebyshevShift) {
        auto base = d.family == Family::LaguerreDivided ? ClassicalBase<T>::laguerre(d.alpha)
                                                        : ClassicalBase<T>::jacobi(d.alpha, d.beta);
        T lam = d.family == Family::LaguerreDivided ? T(0) : T(d.endpoint);
        auto rec = divided_difference_recurrence(base, lam, top);
        for (long n = 0; n <= top; ++n) {
            ++rep.checks;
            auto direct = divided_difference(base, lam, n);
            bool ok = direct.size() == rec[n].size();
            for (std::size_t i = 0; ok && i < direct.size(); ++i) ok = detail::same(direct[i], rec[n][i]);
            if (!ok) rep.failures.push_back("recurrence n=" + std::to_string(n));
            ++rep.checks;
            auto closed = family_coeffs(d, n);
            ok = closed.size() == direct.size();
            for (std::size_t i = 0; ok && i < direct.size(); ++i) ok = detail::same(direct[i], closed[i]);
            if (!ok) rep.failures.push_back("hypergeometric form n=" + std::to_string(n));
        }
        const T x = num<T>::from_ratio(1, 3), t = num<T>::from_ratio(-1, 7);
        for (long m = 0; m <= top; ++m) {
            auto [l, rr] = christoffel_darboux_check(base, lam, m, x, t);
            detail::expect_same(rep, l, rr, "Christoffel-Darboux m=" + std::to_string(m));
        }
    }
    bool exact_op = d.family != Family::ChebyshevShift && !(d.endpoint == -1 && num<T>::exact);
    if (exact_op) {
        auto op = family_op(d);
        std::vector<Element<T>> ps;
        for (long n = 0; n <= top; ++n) ps.push_back(family_poly(d, n));
        for (long i = 0; i <= top; ++i)
            for (long j = i; j <= top; ++j) {
                T v = op.cov(ps[i], ps[j]);
                T want = i == j ? family_norm(d, i) : T(0);
                std::string what = "cov_1(P_" + std::to_string(i) + ", P_" + std::to_string(j) + ")";
                if constexpr (num<T>::exact) {
                    detail::expect_same(rep, v, want, what);
                } else {
                    // scale for the float check: cov_p is at most twice (sum |a_k| |t_k|_2)(sum |b_l| |t_l|_2) in magnitude
                    auto l2 = [&](const Element<T>& e) {
                        double m = 0;
                        for (const auto& [k, c] : e.terms())
                            m += std::fabs(c) * std::sqrt(op.space().expect(
                                                     Element<T>::term(T(1), T(2) * k.lam, T(2) * k.mu, T(2) * k.rate)));
                        return m;
                    };
                    const double mag = 2 * l2(ps[i]) * l2(ps[j]);
                    ++rep.checks;
                    const double tol = float_tolerance() * std::max({std::fabs(v), std::fabs(want), mag});
                    if (!(std::fabs(v - want) <= tol))
                        rep.failures.push_back(what + ": " + num<T>::str(v) + " != " + num<T>::str(want));
                }
            }
    }
    return rep;
}

}  // namespace pvar
