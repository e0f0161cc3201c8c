#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pvar/element.hpp"
#include "pvar/quadrature.hpp"

namespace pvar {

enum class WeightFamily { Uniform, PowerBeta, PowerGamma, Jacobi, Custom };

/// Weight function of a continuous space.
///   Uniform      w = 1 on [a, b]
///   PowerBeta    w = x^p1 (1-x)^p2 on [0, 1]
///   PowerGamma   w = x^p1 exp(-p2 x) on [0, inf)
///   Jacobi       w = (1-x)^p1 (1+x)^p2 on [-1, 1]
///   Custom       user callable on [a, b] (or [a, inf)); Float only
template <class T>
struct WeightSpec {
    WeightFamily family = WeightFamily::Uniform;
    T p1{0}, p2{0};
    RealFn custom;
    std::string label = "uniform";

    static WeightSpec uniform() { return {}; }
    static WeightSpec power_beta(const T& a, const T& b) {
        if (a <= T(-1) || b <= T(-1)) throw ConstraintViolation("beta exponents must exceed -1");
        return {WeightFamily::PowerBeta, a, b, {}, "x^" + num<T>::str(a) + "(1-x)^" + num<T>::str(b)};
    }
    static WeightSpec power_gamma(const T& a, const T& rate) {
        if (a <= T(-1) || rate <= T(0)) throw ConstraintViolation("gamma weight needs a > -1 and rate > 0");
        return {WeightFamily::PowerGamma, a, rate, {}, "x^" + num<T>::str(a) + "exp(-" + num<T>::str(rate) + "x)"};
    }
    static WeightSpec jacobi(const T& alpha, const T& beta) {
        if (alpha <= T(-1) || beta <= T(-1)) throw ConstraintViolation("Jacobi parameters must exceed -1");
        return {WeightFamily::Jacobi, alpha, beta, {},
                "(1-x)^" + num<T>::str(alpha) + "(1+x)^" + num<T>::str(beta)};
    }
    /// Chebyshev weights of the four kinds as Jacobi special cases.
    static WeightSpec chebyshev(int kind) {
        const T h = num<T>::from_ratio(1, 2);
        switch (kind) {
            case 1: return jacobi(-h, -h);
            case 2: return jacobi(h, h);
            case 3: return jacobi(-h, h);
            case 4: return jacobi(h, -h);
            default: throw ConstraintViolation("Chebyshev kind must be 1..4");
        }
    }
    static WeightSpec custom_fn(RealFn fn, std::string label) {
        WeightSpec w;
        w.family = WeightFamily::Custom;
        w.custom = std::move(fn);
        w.label = std::move(label);
        return w;
    }
};

namespace detail {

inline double log_beta(double s, double t) { return std::lgamma(s) + std::lgamma(t) - std::lgamma(s + t); }

/// B(s,t) when it is rational for rational s, t (one argument a positive integer).
template <class T>
std::optional<T> exact_beta(const T& s, const T& t) {
    if (num<T>::is_integer(t) && t > T(0)) return factorial<T>(num<T>::to_long(t) - 1) / pochhammer(s, num<T>::to_long(t));
    if (num<T>::is_integer(s) && s > T(0)) return factorial<T>(num<T>::to_long(s) - 1) / pochhammer(t, num<T>::to_long(s));
    return std::nullopt;
}

/// B(s,t)/B(s0,t0), exact whenever mathematically rational along the two
/// standard routes; Float falls back to log-gamma.
template <class T>
T beta_ratio(const T& s, const T& t, const T& s0, const T& t0) {
    if (s <= T(0) || t <= T(0)) throw DivergentMoment("beta integral diverges");
    T ds = s - s0, dt = t - t0;
    if (num<T>::is_integer(ds) && num<T>::is_integer(dt)) {
        long i = num<T>::to_long(ds), j = num<T>::to_long(dt);
        return pochhammer(s0, i) * pochhammer(t0, j) / pochhammer(T(s0 + t0), i + j);
    }
    auto a = exact_beta(s, t), b = exact_beta(s0, t0);
    if (a && b) return *a / *b;
    if constexpr (num<T>::exact) {
        throw NotExact("beta ratio is not rational");
    } else {
        return std::exp(log_beta(s, t) - log_beta(s0, t0));
    }
}

/// Gamma(s)/Gamma(s0).
template <class T>
T gamma_ratio(const T& s, const T& s0) {
    if (s <= T(0)) throw DivergentMoment("gamma integral diverges");
    T d = s - s0;
    if (num<T>::is_integer(d)) return pochhammer(s0, num<T>::to_long(d));
    if constexpr (num<T>::exact) {
        throw NotExact("gamma ratio is not rational");
    } else {
        return std::exp(std::lgamma(s) - std::lgamma(s0));
    }
}

/// base^e, exact when e is an integer.
template <class T>
T real_pow(const T& base, const T& e) {
    if (num<T>::is_integer(e)) return pow_int(base, num<T>::to_long(e));
    if constexpr (num<T>::exact) {
        throw NotExact("non-integer power of a rational");
    } else {
        return std::pow(base, e);
    }
}

}  // namespace detail

/// Probability space with a normalized expectation operator.
template <class T>
class ProbSpace {
public:
    enum class Kind { Continuous, Discrete, Vectors };

    static ProbSpace uniform01() { return continuous(T(0), T(1), WeightSpec<T>::uniform()); }

    static ProbSpace continuous(const T& a, const T& b, WeightSpec<T> w) {
        ProbSpace s;
        s.kind_ = Kind::Continuous;
        s.weight_ = std::move(w);
        switch (s.weight_.family) {
            case WeightFamily::PowerBeta: s.a_ = T(0), s.b_ = T(1); break;
            case WeightFamily::PowerGamma: s.a_ = T(0), s.b_ = T(0), s.infinite_ = true; break;
            case WeightFamily::Jacobi: s.a_ = T(-1), s.b_ = T(1); break;
            default:
                if (!(a < b)) throw ConstraintViolation("interval must satisfy a < b");
                s.a_ = a, s.b_ = b;
        }
        s.init_mass();
        return s;
    }

    static ProbSpace beta(const T& a, const T& b) { return continuous(T(0), T(1), WeightSpec<T>::power_beta(a, b)); }
    static ProbSpace gamma(const T& a, const T& rate) { return continuous(T(0), T(0), WeightSpec<T>::power_gamma(a, rate)); }
    static ProbSpace jacobi(const T& al, const T& be) { return continuous(T(-1), T(1), WeightSpec<T>::jacobi(al, be)); }

    /// Custom weight on [a, inf).
    static ProbSpace custom_semi_infinite(const T& a, RealFn w, std::string label) {
        ProbSpace s;
        s.kind_ = Kind::Continuous;
        s.weight_ = WeightSpec<T>::custom_fn(std::move(w), std::move(label));
        s.a_ = a;
        s.infinite_ = true;
        s.init_mass();
        return s;
    }

    /// Base space reweighted by a nonnegative polynomial q: E'[f] = E[q f] / E[q].
    static ProbSpace tilted(const ProbSpace& base, Element<T> q) {
        if (base.kind_ != Kind::Continuous) throw IncompatibleRepr("tilting needs a continuous space");
        ProbSpace s = base;
        T m = base.expect(q);
        if (!(m > T(0))) throw ConstraintViolation("tilt must have positive expectation");
        s.base_ = std::make_shared<const ProbSpace>(base);
        s.tilt_ = std::move(q);
        s.tilt_mass_ = m;
        return s;
    }

    static ProbSpace discrete(std::vector<T> points, std::vector<T> masses) {
        if (points.empty()) throw ConstraintViolation("discrete space needs at least one point");
        if (masses.empty()) masses.assign(points.size(), T(1));
        if (masses.size() != points.size()) throw ConstraintViolation("points and masses differ in length");
        for (const auto& m : masses)
            if (!(m > T(0))) throw ConstraintViolation("discrete masses must be positive");
        auto sorted = points;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i] == sorted[i - 1]) throw DuplicateX("sample points must be distinct");
        ProbSpace s;
        s.kind_ = Kind::Discrete;
        s.points_ = std::move(points);
        s.masses_ = std::move(masses);
        s.mass_ = T(0);
        for (const auto& m : s.masses_) s.mass_ += m;
        return s;
    }

    static ProbSpace vectors(std::size_t m) {
        if (m == 0) throw ConstraintViolation("vector dimension must be positive");
        ProbSpace s;
        s.kind_ = Kind::Vectors;
        s.dim_ = m;
        s.mass_ = T(static_cast<long>(m));
        return s;
    }

    Kind kind() const { return kind_; }
    const WeightSpec<T>& weight() const { return weight_; }
    const std::vector<T>& points() const { return points_; }
    const std::vector<T>& masses() const { return masses_; }
    std::size_t size() const { return kind_ == Kind::Vectors ? dim_ : points_.size(); }
    const T& lower() const { return a_; }
    const T& upper() const { return b_; }
    bool semi_infinite() const { return infinite_; }

    /// Tabulated values of an analytic element at the sample points.
    Element<T> materialize(const Element<T>& f) const {
        if (f.is_values()) {
            if (kind_ == Kind::Continuous) throw IncompatibleRepr("tabulated element on a continuous space");
            if (f.value_data().size() != size()) throw IncompatibleRepr("tabulated length does not match space");
            return f;
        }
        if (kind_ != Kind::Discrete) throw IncompatibleRepr("analytic element cannot be materialized here");
        std::vector<T> v;
        v.reserve(points_.size());
        for (const auto& x : points_) v.push_back(f.eval_exact(x));
        return Element<T>::values(std::move(v));
    }

    /// Normalized expectation E[f].
    T expect(const Element<T>& f) const {
        if (kind_ != Kind::Continuous) {
            Element<T> v = materialize(f);
            const auto& d = v.value_data();
            T s(0);
            if (kind_ == Kind::Vectors) {
                for (const auto& x : d) s += x;
            } else {
                for (std::size_t i = 0; i < d.size(); ++i) s += masses_[i] * d[i];
            }
            return num<T>::check(T(s / mass_));
        }
        if (f.is_values()) throw IncompatibleRepr("tabulated element on a continuous space");
        if (base_) return num<T>::check(T(base_->expect(tilt_ * f) / tilt_mass_));
        T s(0);
        for (const auto& [k, c] : f.terms()) s += c * moment(k);
        if (f.has_callables()) {
            if constexpr (num<T>::exact) {
                throw NotExact("callable elements need the Float backend");
            } else {
                for (const auto& fn : f.funcs()) s += fn.coef * numeric_expect(*fn.fn);
            }
        }
        return num<T>::check(s);
    }

    T expect_product(const Element<T>& f, const Element<T>& g) const {
        if (kind_ != Kind::Continuous) return expect(materialize(f) * materialize(g));
        return expect(f * g);
    }

    /// E[x^k z(x)].
    T moment_kz(long k, const Element<T>& z) const {
        if (k < 0) throw ConstraintViolation("moment order must be nonnegative");
        if (kind_ == Kind::Vectors) throw IncompatibleRepr("monomials are undefined on a vector space");
        return expect_product(Element<T>::monomial(k), z);
    }

    /// Numeric E[g] by adaptive quadrature with an endpoint-regularizing substitution.
    double numeric_expect(const RealFn& g) const {
        if (base_) {
            auto q = tilt_.numeric_fn();
            return base_->numeric_expect([&](double x) { return q(x) * g(x); }) / to_double(tilt_mass_);
        }
        return numeric_integral(g) / to_double(mass_);
    }

    /// Total mass of the (unnormalized) weight, as a double.
    double mass_value() const { return to_double(mass_); }

private:
    ProbSpace() = default;

    void init_mass() {
        switch (weight_.family) {
            case WeightFamily::Uniform:
                if (infinite_) throw ConstraintViolation("uniform weight needs a finite interval");
                mass_ = b_ - a_;
                break;
            case WeightFamily::Custom:
                if constexpr (num<T>::exact) {
                    mass_ = T(1);  // never used: custom expectations throw NotExact
                } else {
                    mass_ = numeric_integral([](double) { return 1.0; });
                    if (!(mass_ > 0) || !std::isfinite(mass_)) throw ConstraintViolation("custom weight has no finite positive mass");
                }
                break;
            default:
                mass_ = T(1);  // closed-form families normalize through ratios
                if constexpr (!num<T>::exact) mass_ = closed_mass();
        }
    }

    double closed_mass() const {
        double p1 = to_double(weight_.p1), p2 = to_double(weight_.p2);
        switch (weight_.family) {
            case WeightFamily::PowerBeta: return std::exp(detail::log_beta(p1 + 1, p2 + 1));
            case WeightFamily::PowerGamma: return std::exp(std::lgamma(p1 + 1) - (p1 + 1) * std::log(p2));
            case WeightFamily::Jacobi: return std::exp((p1 + p2 + 1) * std::log(2.0) + detail::log_beta(p1 + 1, p2 + 1));
            default: return 1;
        }
    }

    /// Unnormalized integral of w*g.
    double numeric_integral(const RealFn& g) const {
        double p1 = to_double(weight_.p1), p2 = to_double(weight_.p2);
        quad::Result r;
        switch (weight_.family) {
            case WeightFamily::Uniform:
                r = quad::adaptive(g, to_double(a_), to_double(b_));
                break;
            case WeightFamily::PowerBeta:
                // x = sin^2(t): x^a (1-x)^b dx = 2 sin^{2a+1} cos^{2b+1} dt
                r = quad::adaptive(
                    [&](double t) {
                        double s = std::sin(t), c = std::cos(t);
                        return g(s * s) * 2 * std::pow(s, 2 * p1 + 1) * std::pow(c, 2 * p2 + 1);
                    },
                    0.0, M_PI / 2);
                break;
            case WeightFamily::Jacobi:
                // x = cos(t): (1-x)^al (1+x)^be dx = 2^{al+be+1} s^{2al+1} c^{2be+1} dt, half angles
                r = quad::adaptive(
                    [&](double t) {
                        double s = std::sin(t / 2), c = std::cos(t / 2);
                        return g(std::cos(t)) * std::pow(2.0, p1 + p2 + 1) * std::pow(s, 2 * p1 + 1) *
                               std::pow(c, 2 * p2 + 1);
                    },
                    0.0, M_PI);
                break;
            case WeightFamily::PowerGamma:
                r = quad::semi_infinite([&](double x) { return g(x) * std::pow(x, p1) * std::exp(-p2 * x); }, 0.0);
                break;
            case WeightFamily::Custom: {
                const RealFn& w = weight_.custom;
                auto h = [&](double x) { return g(x) * w(x); };
                r = infinite_ ? quad::semi_infinite(h, to_double(a_)) : quad::adaptive(h, to_double(a_), to_double(b_));
                break;
            }
        }
        if (!std::isfinite(r.value)) throw NonFinite("quadrature produced a non-finite value");
        return r.value;
    }

    /// Normalized moment of one term.
    T moment(const TermKey<T>& k) const {
        const T& p1 = weight_.p1;
        const T& p2 = weight_.p2;
        switch (weight_.family) {
            case WeightFamily::PowerBeta:
                if (k.rate == T(0)) {
                    if (p1 + k.lam <= T(-1) || p2 + k.mu <= T(-1))
                        throw DivergentMoment("moment of x^" + num<T>::str(k.lam) + " diverges on [0,1]");
                    return detail::beta_ratio(T(p1 + k.lam + 1), T(p2 + k.mu + 1), T(p1 + 1), T(p2 + 1));
                }
                break;
            case WeightFamily::Uniform:
                if (a_ == T(0) && b_ == T(1) && k.rate == T(0)) {
                    if (k.lam <= T(-1) || k.mu <= T(-1))
                        throw DivergentMoment("moment of x^" + num<T>::str(k.lam) + " diverges on [0,1]");
                    return detail::beta_ratio(T(k.lam + 1), T(k.mu + 1), T(1), T(1));
                }
                if (k.rate == T(0) && k.mu == T(0)) {
                    if (!num<T>::is_integer(k.lam) && a_ < T(0))
                        throw IncompatibleRepr("non-integer power on an interval containing negatives");
                    if (k.lam < T(0) && a_ <= T(0) && b_ >= T(0)) throw DivergentMoment("negative power at the origin");
                    if (k.lam == T(-1)) {
                        if constexpr (num<T>::exact) throw NotExact("logarithmic moment");
                        else return (std::log(std::fabs(b_)) - std::log(std::fabs(a_))) / mass_;
                    }
                    T e = k.lam + 1;
                    return (detail::real_pow(b_, e) - detail::real_pow(a_, e)) / (e * mass_);
                }
                break;
            case WeightFamily::Jacobi:
                if (k.rate == T(0)) {
                    if (!num<T>::is_integer(k.lam) || k.lam < T(0))
                        throw IncompatibleRepr("only nonnegative integer powers of x on [-1,1]");
                    long n = num<T>::to_long(k.lam);
                    T s(0);
                    for (long j = 0; j <= n; ++j) {
                        T e = k.mu + T(j);
                        if (p1 + e <= T(-1)) throw DivergentMoment("moment diverges at x = 1");
                        T term = binomial<T>(n, j) * detail::real_pow(T(2), e) *
                                 detail::beta_ratio(T(p1 + e + 1), T(p2 + 1), T(p1 + 1), T(p2 + 1));
                        s += (j % 2) ? T(-term) : term;
                    }
                    return s;
                }
                break;
            case WeightFamily::PowerGamma:
                if (k.mu == T(0)) {
                    if (p1 + k.lam <= T(-1)) throw DivergentMoment("gamma moment diverges at 0");
                    if (!(k.rate < p2)) throw DivergentMoment("exponential growth beats the gamma weight");
                    T g = detail::gamma_ratio(T(p1 + k.lam + 1), T(p1 + 1));
                    if (k.rate == T(0)) return g / detail::real_pow(p2, k.lam);
                    return g * detail::real_pow(p2, T(p1 + 1)) / detail::real_pow(T(p2 - k.rate), T(p1 + k.lam + 1));
                }
                throw IncompatibleRepr("(1-x)^mu with non-integer mu on [0,inf)");
            case WeightFamily::Custom: break;
        }
        if constexpr (num<T>::exact) {
            throw NotExact("moment has no exact closed form here");
        } else {
            TermKey<T> kk = k;
            return numeric_expect([kk](double x) { return Element<T>::eval_term(kk, x); });
        }
    }

    Kind kind_ = Kind::Continuous;
    WeightSpec<T> weight_;
    T a_{0}, b_{1};
    bool infinite_ = false;
    T mass_{1};
    std::vector<T> points_, masses_;
    std::size_t dim_ = 0;
    std::shared_ptr<const ProbSpace> base_;
    Element<T> tilt_;
    T tilt_mass_{1};
};

}  // namespace pvar
