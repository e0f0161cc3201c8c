#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pvar/scalar.hpp"

namespace pvar {

/// Exponent triple of a term x^lam (1-x)^mu exp(rate x).
template <class T>
struct TermKey {
    T lam{0}, mu{0}, rate{0};
    bool operator<(const TermKey& o) const {
        if (lam != o.lam) return lam < o.lam;
        if (mu != o.mu) return mu < o.mu;
        return rate < o.rate;
    }
    bool operator==(const TermKey& o) const { return lam == o.lam && mu == o.mu && rate == o.rate; }
    bool is_monomial() const {
        return mu == T(0) && rate == T(0) && num<T>::is_integer(lam) && lam >= T(0);
    }
};

using RealFn = std::function<double(double)>;

/// A random element over some probability space.
///
/// Analytic elements are finite sums of terms c x^lam (1-x)^mu e^{rate x}
/// plus optional numeric callables. Value elements carry one entry per
/// sample point (tabulated data) or per coordinate (vectors).
template <class T>
class Element {
public:
    struct Func {
        T coef;
        std::shared_ptr<const RealFn> fn;
        std::string label;
    };

    Element() = default;

    static Element constant(const T& c) { return term(c, T(0), T(0), T(0)); }
    static Element monomial(long k, const T& c = T(1)) { return term(c, T(k), T(0), T(0)); }
    static Element power(const T& lam) { return term(T(1), lam, T(0), T(0)); }
    static Element power_product(const T& lam, const T& mu) { return term(T(1), lam, mu, T(0)); }
    static Element exponential(const T& rate) { return term(T(1), T(0), T(0), rate); }

    static Element term(const T& c, const T& lam, const T& mu, const T& rate) {
        Element e;
        e.add_term(TermKey<T>{lam, mu, rate}, c);
        return e;
    }

    static Element poly(const std::vector<T>& coeffs) {
        Element e;
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            e.add_term(TermKey<T>{T(static_cast<long>(k)), T(0), T(0)}, coeffs[k]);
        return e;
    }

    static Element callable(RealFn fn, std::string label) {
        Element e;
        e.funcs_.push_back({T(1), std::make_shared<const RealFn>(std::move(fn)), std::move(label)});
        return e;
    }

    static Element values(std::vector<T> v) {
        Element e;
        e.is_values_ = true;
        e.values_ = std::move(v);
        return e;
    }

    bool is_values() const { return is_values_; }
    bool has_callables() const { return !funcs_.empty(); }
    const std::vector<T>& value_data() const { return values_; }
    const std::map<TermKey<T>, T>& terms() const { return terms_; }
    const std::vector<Func>& funcs() const { return funcs_; }

    bool is_zero() const {
        if (is_values_) {
            for (const auto& v : values_)
                if (v != T(0)) return false;
            return true;
        }
        return terms_.empty() && funcs_.empty();
    }

    bool is_polynomial() const {
        if (is_values_ || !funcs_.empty()) return false;
        for (const auto& [k, c] : terms_)
            if (!k.is_monomial()) return false;
        return true;
    }

    /// Ascending monomial coefficients with trailing zeros trimmed.
    std::vector<T> coeffs() const {
        if (!is_polynomial()) throw IncompatibleRepr("element is not a polynomial");
        std::vector<T> c;
        for (const auto& [k, v] : terms_) {
            auto d = static_cast<std::size_t>(num<T>::to_long(k.lam));
            if (c.size() <= d) c.resize(d + 1, T(0));
            c[d] = v;
        }
        while (!c.empty() && c.back() == T(0)) c.pop_back();
        return c;
    }

    long degree() const { return static_cast<long>(coeffs().size()) - 1; }

    /// Coefficient of a given term key (0 if absent).
    T coef(const TermKey<T>& k) const {
        auto it = terms_.find(k);
        return it == terms_.end() ? T(0) : it->second;
    }

    Element& operator+=(const Element& o) {
        if (is_values_ || o.is_values_) {
            combine_values(o, T(1));
            return *this;
        }
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        for (const auto& f : o.funcs_) funcs_.push_back(f);
        return *this;
    }
    Element& operator-=(const Element& o) { return *this += o * T(-1); }

    Element& operator*=(const T& s) {
        if (is_values_) {
            for (auto& v : values_) v *= s;
            return *this;
        }
        if (s == T(0)) {
            terms_.clear();
            funcs_.clear();
            return *this;
        }
        for (auto& [k, c] : terms_) c *= s;
        for (auto& f : funcs_) f.coef *= s;
        return *this;
    }

    friend Element operator+(Element a, const Element& b) { return a += b; }
    friend Element operator-(Element a, const Element& b) { return a -= b; }
    friend Element operator*(Element a, const T& s) { return a *= s; }
    friend Element operator*(const T& s, Element a) { return a *= s; }
    friend Element operator-(Element a) { return a *= T(-1); }

    friend Element operator*(const Element& a, const Element& b) {
        if (a.is_values_ || b.is_values_) {
            if (!(a.is_values_ && b.is_values_))
                throw IncompatibleRepr("cannot multiply tabulated and analytic elements without a space");
            if (a.values_.size() != b.values_.size()) throw IncompatibleRepr("length mismatch");
            Element r = a;
            for (std::size_t i = 0; i < r.values_.size(); ++i) r.values_[i] *= b.values_[i];
            return r;
        }
        Element r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add_term(TermKey<T>{ka.lam + kb.lam, ka.mu + kb.mu, ka.rate + kb.rate}, ca * cb);
        if (!a.funcs_.empty() || !b.funcs_.empty()) {
            auto fa = a.numeric_fn(), fb = b.numeric_fn();
            std::string label = "(" + a.label() + ")*(" + b.label() + ")";
            r = Element();
            r.funcs_.push_back({T(1), std::make_shared<const RealFn>([fa, fb](double x) { return fa(x) * fb(x); }),
                                label});
        }
        return r;
    }

    /// Floating evaluation (any analytic element).
    double eval(double x) const {
        if (is_values_) throw IncompatibleRepr("tabulated element has no pointwise evaluation");
        double s = 0;
        for (const auto& [k, c] : terms_) s += to_double(c) * eval_term(k, x);
        for (const auto& f : funcs_) s += to_double(f.coef) * (*f.fn)(x);
        return s;
    }

    /// Exact evaluation; NotExact under Rational when a term has a non-integer power or a callable.
    T eval_exact(const T& x) const {
        if constexpr (!num<T>::exact) {
            return eval(x);
        } else {
            if (is_values_) throw IncompatibleRepr("tabulated element has no pointwise evaluation");
            if (!funcs_.empty()) throw NotExact("callable elements are Float-only");
            T s(0);
            for (const auto& [k, c] : terms_) {
                if (!num<T>::is_integer(k.lam) || !num<T>::is_integer(k.mu) || k.rate != T(0))
                    throw NotExact("non-integer power or exponential at a rational point");
                s += c * pow_int(x, num<T>::to_long(k.lam)) * pow_int(T(1) - x, num<T>::to_long(k.mu));
            }
            return s;
        }
    }

    RealFn numeric_fn() const {
        Element copy = *this;
        return [copy](double x) { return copy.eval(x); };
    }

    std::string label() const {
        if (is_values_) return "values[" + std::to_string(values_.size()) + "]";
        std::string s;
        for (const auto& [k, c] : terms_) {
            if (!s.empty()) s += " + ";
            s += num<T>::str(c);
            if (k.lam != T(0)) s += "*x^" + num<T>::str(k.lam);
            if (k.mu != T(0)) s += "*(1-x)^" + num<T>::str(k.mu);
            if (k.rate != T(0)) s += "*exp(" + num<T>::str(k.rate) + "x)";
        }
        for (const auto& f : funcs_) {
            if (!s.empty()) s += " + ";
            s += num<T>::str(f.coef) + "*" + f.label;
        }
        return s.empty() ? "0" : s;
    }

    static double eval_term(const TermKey<T>& k, double x) {
        double v = 1;
        if (num<T>::is_integer(k.lam)) {
            long n = num<T>::to_long(k.lam);
            v *= n >= 0 ? std::pow(x, static_cast<double>(n)) : 1.0 / std::pow(x, static_cast<double>(-n));
        } else {
            v *= std::pow(x, to_double(k.lam));
        }
        if (k.mu != T(0)) v *= std::pow(1 - x, to_double(k.mu));
        if (k.rate != T(0)) v *= std::exp(to_double(k.rate) * x);
        return v;
    }

private:
    void add_term(const TermKey<T>& k, const T& c) {
        if (c == T(0)) return;
        // (1-x)^mu with integer mu >= 0 is expanded so polynomials stay canonical.
        if (k.mu != T(0) && num<T>::is_integer(k.mu) && k.mu > T(0)) {
            long m = num<T>::to_long(k.mu);
            for (long j = 0; j <= m; ++j) {
                T b = binomial<T>(m, j);
                if (j % 2) b = -b;
                add_term(TermKey<T>{k.lam + T(j), T(0), k.rate}, c * b);
            }
            return;
        }
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second += c;
            if (it->second == T(0)) terms_.erase(it);
        }
    }

    void combine_values(const Element& o, const T& s) {
        if (!(is_values_ && o.is_values_)) throw IncompatibleRepr("cannot add tabulated and analytic elements");
        if (values_.size() != o.values_.size()) throw IncompatibleRepr("length mismatch");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
    }

    std::map<TermKey<T>, T> terms_;
    std::vector<Func> funcs_;
    bool is_values_ = false;
    std::vector<T> values_;
};

/// Multiply a polynomial element by x.
template <class T>
Element<T> times_x(const Element<T>& e) {
    return e * Element<T>::monomial(1);
}

}  // namespace pvar
