#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace pvar {

using Rational = mpq_class;

/// Input or configuration rejected before any numerics ran.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define PVAR_ERROR(Name, Base)                                   \
    class Name : public Base {                                   \
    public:                                                      \
        explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
    }

PVAR_ERROR(DivergentMoment, ValidationError);
PVAR_ERROR(IncompatibleRepr, ValidationError);
PVAR_ERROR(ConstraintViolation, ValidationError);
PVAR_ERROR(PoleInLowerParams, ValidationError);
PVAR_ERROR(DuplicateNodes, ValidationError);
PVAR_ERROR(InvalidBounds, ValidationError);
PVAR_ERROR(NotOrthogonal, ValidationError);
PVAR_ERROR(ParseError, ValidationError);
PVAR_ERROR(DuplicateX, ValidationError);
PVAR_ERROR(NotExact, NumericalError);
PVAR_ERROR(NegativeVariance, NumericalError);
PVAR_ERROR(DegenerateVariance, NumericalError);
PVAR_ERROR(DegenerateBasis, NumericalError);
PVAR_ERROR(InconsistentSystem, NumericalError);
PVAR_ERROR(RankDeficient, NumericalError);
PVAR_ERROR(SingularModifiedSystem, NumericalError);
PVAR_ERROR(NonFinite, NumericalError);

#undef PVAR_ERROR

/// Relative tolerance for the Float backend; PVAR_TOL overrides the default 1e-10.
inline double float_tolerance() {
    static const double tol = [] {
        if (const char* s = std::getenv("PVAR_TOL")) {
            char* end = nullptr;
            double v = std::strtod(s, &end);
            if (end != s && v > 0 && std::isfinite(v)) return v;
        }
        return 1e-10;
    }();
    return tol;
}

template <class T>
struct num;

template <>
struct num<double> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";
    static double from_int(long v) { return static_cast<double>(v); }
    static double from_ratio(long p, long q) { return static_cast<double>(p) / static_cast<double>(q); }
    static double from_double(double v) { return check(v); }
    static double to_double(double v) { return v; }
    static double check(double v) {
        if (!std::isfinite(v)) throw NonFinite("non-finite floating value");
        return v;
    }
    static double sqrt(double v) {
        if (v < 0) throw NumericalError("sqrt of negative value");
        return std::sqrt(v);
    }
    static bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15; }
    static long to_long(double v) { return static_cast<long>(std::llround(v)); }
    static double abs(double v) { return std::fabs(v); }
    static bool is_zero(double v, double scale = 1.0) {
        return std::fabs(v) <= float_tolerance() * std::max(1.0, std::fabs(scale));
    }
    static bool eq(double a, double b) {
        return std::fabs(a - b) <= float_tolerance() * std::max({1.0, std::fabs(a), std::fabs(b)});
    }
    static std::string str(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
};

template <>
struct num<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* name = "rational";
    static Rational from_int(long v) { return Rational(v); }
    static Rational from_ratio(long p, long q) {
        Rational r(p, q);
        r.canonicalize();
        return r;
    }
    static Rational from_double(double v) {
        if (!std::isfinite(v)) throw NonFinite("non-finite value cannot be rational");
        return Rational(v);
    }
    static double to_double(const Rational& v) { return v.get_d(); }
    static const Rational& check(const Rational& v) { return v; }
    static Rational sqrt(const Rational& v) {
        if (sgn(v) < 0) throw NumericalError("sqrt of negative value");
        mpz_class n = v.get_num(), d = v.get_den();
        if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
            throw NotExact("square root of " + v.get_str() + " is irrational");
        mpz_class rn, rd;
        mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
        mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
        return Rational(rn, rd);
    }
    static bool is_integer(const Rational& v) { return v.get_den() == 1; }
    static long to_long(const Rational& v) {
        mpz_class q = v.get_num() / v.get_den();
        return q.get_si();
    }
    static Rational abs(const Rational& v) { return ::abs(v); }
    static bool is_zero(const Rational& v, const Rational& = Rational(1)) { return sgn(v) == 0; }
    static bool eq(const Rational& a, const Rational& b) { return a == b; }
    static std::string str(const Rational& v) { return v.get_str(); }
};

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
T pow_int(T base, long e) {
    if (e < 0) {
        if (base == T(0)) throw DivergentMoment("zero to a negative power");
        return T(1) / pow_int(base, -e);
    }
    T r(1);
    while (e > 0) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

/// Rising factorial (a)_n; negative n gives 1/((a-1)(a-2)...(a+n)).
template <Scalar T>
T pochhammer(const T& a, long n) {
    T r(1);
    if (n >= 0) {
        for (long k = 0; k < n; ++k) r *= a + T(k);
    } else {
        for (long k = 1; k <= -n; ++k) {
            T f = a - T(k);
            if (f == T(0)) throw DivergentMoment("pole in Pochhammer symbol");
            r /= f;
        }
    }
    return r;
}

/// GMP expression templates collapse to Rational before entering the helpers above.
template <class U, class V>
    requires(!std::same_as<__gmp_expr<U, V>, Rational>)
Rational pow_int(const __gmp_expr<U, V>& base, long e) {
    return pow_int(Rational(base), e);
}

template <class U, class V>
    requires(!std::same_as<__gmp_expr<U, V>, Rational>)
Rational pochhammer(const __gmp_expr<U, V>& a, long n) {
    return pochhammer(Rational(a), n);
}

template <class T>
T factorial(long n) {
    T r(1);
    for (long k = 2; k <= n; ++k) r *= T(k);
    return r;
}

template <class T>
T binomial(long n, long k) {
    if (k < 0 || k > n) return T(0);
    T r(1);
    for (long i = 1; i <= k; ++i) r = r * T(n - k + i) / T(i);
    return r;
}

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.get_d(); }

}  // namespace pvar
