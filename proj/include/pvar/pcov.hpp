#pragma once

#include <string>
#include <vector>

#include "pvar/space.hpp"

namespace pvar {

/// The fixed variable Z, or an orthogonal family {Z_k}.
template <class T>
class FixedVar {
public:
    FixedVar() = default;
    explicit FixedVar(Element<T> z) : members_{std::move(z)} {}
    explicit FixedVar(std::vector<Element<T>> zs) : members_(std::move(zs)) {}

    const std::vector<Element<T>>& members() const { return members_; }
    std::size_t size() const { return members_.size(); }

    /// True when every member is a constant.
    bool is_constant() const {
        for (const auto& z : members_) {
            if (z.is_values()) {
                for (const auto& v : z.value_data())
                    if (v != z.value_data().front()) return false;
                continue;
            }
            if (z.has_callables()) return false;
            for (const auto& [k, c] : z.terms())
                if (!(k == TermKey<T>{})) return false;
        }
        return true;
    }

private:
    std::vector<Element<T>> members_;
};

/// p-covariance operator bound to (space, Z, p).
template <class T>
class PCovOp {
public:
    PCovOp(ProbSpace<T> space, FixedVar<T> z, T p) : space_(std::move(space)), z_(std::move(z)), p_(std::move(p)) {
        if (p_ < T(0) || p_ > T(1)) throw ConstraintViolation("p must lie in [0, 1]");
        if (z_.size() == 0) throw ConstraintViolation("fixed variable needs at least one member");
        for (const auto& zk : z_.members()) {
            T e = space_.expect_product(zk, zk);
            if (!(e > T(0))) throw ConstraintViolation("E(Z^2) must be positive");
            zz_.push_back(e);
        }
        for (std::size_t i = 0; i < zz_.size(); ++i)
            for (std::size_t j = i + 1; j < zz_.size(); ++j) {
                T e = space_.expect_product(z_.members()[i], z_.members()[j]);
                bool ok;
                if constexpr (num<T>::exact) {
                    ok = e == T(0);
                } else {
                    ok = std::fabs(e) <= float_tolerance() * std::sqrt(zz_[i] * zz_[j]);
                }
                if (!ok) throw NotOrthogonal("fixed variables Z_" + std::to_string(i) + " and Z_" + std::to_string(j));
            }
    }

    PCovOp(ProbSpace<T> space, Element<T> z, T p) : PCovOp(std::move(space), FixedVar<T>(std::move(z)), std::move(p)) {}

    const ProbSpace<T>& space() const { return space_; }
    const FixedVar<T>& z() const { return z_; }
    const T& p() const { return p_; }
    const std::vector<T>& z_norms() const { return zz_; }

    /// Same space and Z with a different p.
    PCovOp with_p(const T& p) const {
        PCovOp o = *this;
        if (p < T(0) || p > T(1)) throw ConstraintViolation("p must lie in [0, 1]");
        o.p_ = p;
        return o;
    }

    T expect(const Element<T>& x) const { return space_.expect(x); }
    T inner(const Element<T>& x, const Element<T>& y) const { return space_.expect_product(x, y); }

    /// E(X Z_k) for every member.
    std::vector<T> z_moments(const Element<T>& x) const {
        std::vector<T> out;
        out.reserve(zz_.size());
        for (const auto& zk : z_.members()) out.push_back(space_.expect_product(x, zk));
        return out;
    }

    T cov(const Element<T>& x, const Element<T>& y) const {
        T s = inner(x, y);
        if (p_ == T(0)) return s;
        auto ex = z_moments(x), ey = z_moments(y);
        for (std::size_t k = 0; k < zz_.size(); ++k) s -= p_ * ex[k] * ey[k] / zz_[k];
        return s;
    }

    T var(const Element<T>& x) const {
        T v = cov(x, x);
        if constexpr (!num<T>::exact) {
            if (v < 0) {
                double scale = std::max(1.0, std::fabs(inner(x, x)));
                if (v >= -1e-12 * scale) return 0.0;
                throw NegativeVariance("var_p = " + num<T>::str(v));
            }
        } else {
            if (v < T(0)) throw NegativeVariance("var_p = " + v.get_str());
        }
        return v;
    }

    T rho(const Element<T>& x, const Element<T>& y) const {
        T vx = var(x), vy = var(y);
        if (is_zero_var(vx, x) || is_zero_var(vy, y)) throw DegenerateVariance("rho_p needs positive variances");
        T c = cov(x, y);
        if constexpr (num<T>::exact) {
            // rho is irrational in general; exact only when vx*vy is a perfect square.
            return c / num<T>::sqrt(T(vx * vy));
        } else {
            double r = c / std::sqrt(vx * vy);
            if (r > 1 && r < 1 + 1e-12) r = 1;
            if (r < -1 && r > -1 - 1e-12) r = -1;
            return r;
        }
    }

    /// Sum_k E(X Z_k)/E(Z_k^2) Z_k.
    Element<T> proj(const Element<T>& x) const {
        auto ex = z_moments(x);
        Element<T> out;
        bool first = true;
        for (std::size_t k = 0; k < zz_.size(); ++k) {
            Element<T> t = z_.members()[k] * T(ex[k] / zz_[k]);
            if (space_.kind() != ProbSpace<T>::Kind::Continuous) t = space_.materialize(t);
            out = first ? t : out + t;
            first = false;
        }
        return out;
    }

    /// 1 - sqrt(1-p).
    T shrink() const { return T(1) - num<T>::sqrt(T(T(1) - p_)); }

    /// X - (1 - sqrt(1-p)) proj_Z X.
    Element<T> companion(const Element<T>& x) const {
        Element<T> base = space_.kind() != ProbSpace<T>::Kind::Continuous ? space_.materialize(x) : x;
        T s = shrink();
        if (s == T(0)) return base;
        return base - proj(x) * s;
    }

    /// p-normal standard variable.
    Element<T> normalize(const Element<T>& x) const {
        T v = var(x);
        if (is_zero_var(v, x)) throw DegenerateVariance("cannot normalize a zero p-variance element");
        return companion(x) * T(T(1) / num<T>::sqrt(v));
    }

    bool uncorrelated(const Element<T>& x, const Element<T>& y) const {
        T c = cov(x, y);
        if constexpr (num<T>::exact) {
            return c == T(0);
        } else {
            double scale = std::sqrt(std::fabs(inner(x, x)) * std::fabs(inner(y, y)));
            return std::fabs(c) <= float_tolerance() * std::max(scale, 1e-300);
        }
    }

    bool is_zero_var(const T& v, const Element<T>& x) const {
        if constexpr (num<T>::exact) {
            return v == T(0);
        } else {
            return v <= float_tolerance() * std::max(1e-300, std::fabs(inner(x, x)));
        }
    }

private:
    ProbSpace<T> space_;
    FixedVar<T> z_;
    T p_;
    std::vector<T> zz_;
};

}  // namespace pvar
