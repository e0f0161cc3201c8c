#include <doctest.h>

#include <cmath>
#include <functional>

#include "pvar/polyfam.hpp"
#include "pvar/uncorrelate.hpp"
#include "support.hpp"

using namespace pvar;
using Q = Rational;
using testing_support::q;

namespace {

using FD = FamilyDescriptor<Q>;

std::vector<Element<Q>> monomials(long n) {
    std::vector<Element<Q>> v;
    for (long k = 0; k <= n; ++k) v.push_back(Element<Q>::monomial(k));
    return v;
}

poly::Coeffs<Q> monic_of(poly::Coeffs<Q> c) { return poly::scale(c, Q(1 / c.back())); }

const std::vector<std::pair<Q, Q>>& unified_samples() {
    static const std::vector<std::pair<Q, Q>> s{{q(1, 3), q(2, 5)}, {q(1), q(3, 2)}, {q(2), q(1)},
                                                {q(1, 2), q(-1, 5)}, {q(3), q(7, 3)}, {q(0), q(5, 2)}};
    return s;
}

}  // namespace

TEST_CASE("hypergeometric coefficients") {
    auto legendre = HypTerminating<Q>::make({q(-1), q(2)}, {q(1)});
    CHECK(hyp_coeffs(legendre) == std::vector<Q>{q(1), q(-2)});
    CHECK(hyp_eval(legendre, q(1, 4)) == q(1, 2));

    auto empty = HypTerminating<Q>::make({}, {});
    CHECK(hyp_eval(empty, q(7)) == q(1));

    for (Q r : {q(1, 3), q(5, 2), q(-1, 4)}) {
        auto p1 = hyp_coeffs(beta_unified_hyp(Q(0), r, 1));
        CHECK(p1 == std::vector<Q>{q(1), Q(-2 * r * (r + 2) / (r * r - 1))});
        auto p2 = family_coeffs(FD::beta_power(r), 2);
        CHECK(p2[0] == q(1));
        CHECK(p2[1] == Q(-6 * r * (r + 2) / (r * r - 1)));
        CHECK(p2[2] == Q(6 * r * (r + 3) / ((r - 2) * (r + 1))));
    }

    CHECK_THROWS_AS(HypTerminating<Q>::make({q(1, 2)}, {q(1)}), ConstraintViolation);
    CHECK_THROWS_AS(hyp_coeffs(HypTerminating<Q>::make({q(-3)}, {q(-1)})), PoleInLowerParams);
    CHECK_THROWS_AS(family_coeffs(FD::beta_power(q(3)), 3), PoleInLowerParams);
}

TEST_CASE("descriptor constraints") {
    CHECK_THROWS_AS(FD::beta_unified(q(1), q(1)), ConstraintViolation);
    CHECK_THROWS_AS(FD::beta_unified(q(3), q(1, 2)), ConstraintViolation);
    CHECK_THROWS_AS(FD::beta_power(q(-1, 2)), ConstraintViolation);
    CHECK_THROWS_AS(FD::beta_power(q(0)), ConstraintViolation);
    CHECK_THROWS_AS(FD::beta_ordinary(q(0)), ConstraintViolation);
    CHECK_THROWS_AS(FD::jacobi_divided(q(-1), q(0), 1), ConstraintViolation);
    CHECK_THROWS_AS(FD::jacobi_divided(q(0), q(0), 0), ConstraintViolation);
    CHECK_THROWS_AS(FD::chebyshev_divided(5), ConstraintViolation);
    CHECK_THROWS_AS(FD::laguerre_divided(q(-2)), ConstraintViolation);
    CHECK_THROWS_AS(FD::chebyshev_shift(q(3, 2)), ConstraintViolation);
    CHECK(FD::beta_power(q(3)).max_degree() == 2L);
    CHECK(!FD::beta_power(q(5, 2)).max_degree());
}

TEST_CASE("closed-form norms equal exact p-variances") {
    auto check_family = [](const FD& d) {
        auto op = family_op(d);
        long top = std::min(5L, d.max_degree().value_or(5));
        for (long n = 0; n <= top; ++n) CHECK(op.var(family_poly(d, n)) == family_norm(d, n));
    };
    for (Q r : {q(1, 3), q(5, 2), q(-1, 4), q(7, 3), q(11, 5), q(9)}) check_family(FD::beta_power(r));
    for (Q r : {q(1, 3), q(1), q(5, 2), q(-1, 4), q(2)}) check_family(FD::beta_ordinary(r));
    for (auto [a, c] : unified_samples()) check_family(FD::beta_unified(a, c));
}

TEST_CASE("unified family specializations") {
    for (Q r : {q(1, 3), q(5, 2), q(-1, 4)})
        for (long n = 0; n <= 5; ++n) {
            CHECK(family_coeffs(FD::beta_unified(Q(0), r), n) == family_coeffs(FD::beta_power(r), n));
            CHECK(family_coeffs(FD::beta_unified(Q(2 * r), r), n) == family_coeffs(FD::beta_ordinary(r), n));
        }
    auto e = family_poly(FD::beta_ordinary(q(1, 2)), 1);
    CHECK(e.coef(TermKey<Q>{q(1, 2), Q(0), Q(0)}) == q(1));
    CHECK(!e.is_polynomial());
}

TEST_CASE("family agrees with Gram-Schmidt on monomials") {
    for (auto [a, c] : unified_samples()) {
        auto d = FD::beta_unified(a, c);
        long top = std::min(6L, d.max_degree().value_or(6));
        auto gs = gram_schmidt_p(family_op(d), monomials(top));
        for (long n = 0; n <= top; ++n) CHECK(gs.elements[n].coeffs() == monic_of(family_coeffs(d, n)));
    }
}

TEST_CASE("limit degenerations to shifted Jacobi") {
    for (Q a : {q(1, 2), q(2), q(3)}) {
        Q c = (a - 1) / 2;
        for (long n = 0; n <= 4; ++n) {
            auto want = hyp_coeffs(HypTerminating<Q>::make({Q(-n), Q(n + a + 1)}, {Q(a + 1)}));
            CHECK(hyp_coeffs(beta_unified_hyp(a, c, n)) == want);
        }
    }
    const double a = 1.5;
    for (long n = 1; n <= 4; ++n) {
        auto want = hyp_coeffs(HypTerminating<double>::make({-double(n), n + a + 1}, {a + 1}));
        auto got = hyp_coeffs(beta_unified_hyp(a, 1e7, n));
        for (std::size_t k = 0; k < want.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-5));
    }
}

TEST_CASE("sum identity over m, n <= 6") {
    CHECK(sum_identity_lhs(3, 1, q(1, 2)) == Q(0));
    CHECK(sum_identity_lhs(2, 2, q(1)) == q(10, 7));
    for (Q r : {q(1, 2), q(1), q(3, 2), q(2)})
        for (long n = 0; n <= 6; ++n)
            for (long m = 0; m <= 6; ++m) {
                CHECK(sum_identity_lhs(n, m, r) == sum_identity_rhs(n, m, r));
                if (n == m) CHECK(sum_identity_rhs(n, m, r) == factorial<Q>(n) * (n + 2 * r + 1) / (2 * n + 2 * r + 1));
            }
}

TEST_CASE("5F4 closed forms against direct summation") {
    for (Q r : {q(1, 3), q(5, 2), q(-1, 4), q(7, 3)})
        for (long m = 0; m <= 5; ++m)
            for (long k = 0; k <= 5; ++k) {
                CHECK(hyp_sum_at_one(hyp_power(r, k, m)) == hyp_power_closed(r, k, m));
                CHECK(hyp_sum_at_one(hyp_ordinary(r, k, m)) == hyp_ordinary_closed(r, k, m));
            }
    for (auto [a, c] : unified_samples())
        for (long m = 0; m <= 5; ++m)
            for (long k = 0; k <= 5; ++k) {
                if (auto md = FD::beta_unified(a, c).max_degree(); md && m > *md) continue;
                CHECK(hyp_sum_at_one(hyp_unified(a, c, k, m)) == hyp_unified_closed(a, c, k, m));
            }
}

TEST_CASE("identity suite passes on every exact family") {
    std::vector<FD> fams{FD::beta_power(q(1, 3)),           FD::beta_power(q(3)),         FD::beta_ordinary(q(5, 2)),
                         FD::beta_unified(q(1, 3), q(2, 5)), FD::jacobi_divided(q(0), q(0), 1),
                         FD::jacobi_divided(q(1, 2), q(-1, 3), -1), FD::chebyshev_divided(3),
                         FD::laguerre_divided(q(1))};
    for (const auto& d : fams) {
        auto rep = identity_suite(d, 5, 4);
        INFO(d.name());
        CHECK(rep.checks > 0);
        CHECK(rep.pass());
        for (const auto& f : rep.failures) MESSAGE(f);
    }
}

TEST_CASE("finite set for z = x^3 and its orthogonal companions") {
    auto d = FD::beta_power(q(3));
    std::vector<Element<Q>> want{
        Element<Q>::poly({q(1), q(0), q(0), q(-7, 4)}),
        Element<Q>::poly({q(1), q(-15, 4), q(0), q(7, 2)}),
        Element<Q>::poly({q(1), q(-45, 4), q(27), q(-35, 2)}),
    };
    auto s = ProbSpace<Q>::uniform01();
    auto op = family_op(d);
    std::vector<Element<Q>> basis;
    for (long n = 0; n <= 2; ++n) basis.push_back(family_poly(d, n));
    UncorrelatedBasis<Q> ub{basis, {}, basis};
    for (const auto& b : basis) ub.variances.push_back(op.var(b));
    auto general = orthogonal_companion(op, ub);
    for (long n = 0; n <= 2; ++n) {
        auto g = family_companion(d, n);
        CHECK(g.coeffs() == want[n].coeffs());
        CHECK(general[n].coeffs() == want[n].coeffs());
    }
    const Q norms[] = {q(9, 16), q(3, 16), q(9, 80)};
    for (long i = 0; i <= 2; ++i)
        for (long j = 0; j <= 2; ++j) CHECK(s.expect(want[i] * want[j]) == (i == j ? norms[i] : Q(0)));
    CHECK_THROWS_AS(family_companion(d, 3), PoleInLowerParams);
}

TEST_CASE("Jacobi base recurrence matches the hypergeometric form") {
    for (auto [a, b] : std::vector<std::pair<Q, Q>>{{q(0), q(0)}, {q(-1, 2), q(-1, 2)}, {q(1, 2), q(-1, 3)}, {q(2), q(3, 4)}})
        for (long n = 0; n <= 6; ++n) CHECK(ClassicalBase<Q>::jacobi(a, b).monic(n) == jacobi_monic_hyp(a, b, n));
    CHECK(ClassicalBase<Q>::jacobi(q(0), q(0)).monic(2) == std::vector<Q>{q(-1, 3), q(0), q(1)});
    CHECK(ClassicalBase<Q>::laguerre(q(0)).monic(2) == std::vector<Q>{q(2), q(-4), q(1)});
}

TEST_CASE("divided differences: synthetic division, recurrence and closed forms") {
    for (auto [a, b] : std::vector<std::pair<Q, Q>>{{q(0), q(0)}, {q(1, 2), q(-1, 3)}, {q(3), q(1)}}) {
        auto base = ClassicalBase<Q>::jacobi(a, b);
        for (Q lam : {q(1), q(-1), q(1, 3)}) {
            auto rec = divided_difference_recurrence(base, lam, 6);
            for (long n = 0; n <= 6; ++n) CHECK(rec[n] == divided_difference(base, lam, n));
        }
        for (long n = 0; n <= 6; ++n) {
            CHECK(divided_difference(base, Q(1), n) == jacobi_divided_hyp(a, b, n));
            auto mirrored = divided_difference(ClassicalBase<Q>::jacobi(b, a), Q(1), n);
            CHECK(divided_difference(base, Q(-1), n) == reflect(mirrored, n));
        }
    }
    for (Q al : {q(0), q(1), q(-1, 2)}) {
        auto base = ClassicalBase<Q>::laguerre(al);
        auto rec = divided_difference_recurrence(base, Q(0), 6);
        for (long n = 0; n <= 6; ++n) {
            CHECK(rec[n] == divided_difference(base, Q(0), n));
            CHECK(rec[n] == laguerre_divided_hyp(al, n));
        }
    }
}

TEST_CASE("Christoffel-Darboux analogue") {
    auto leg = ClassicalBase<Q>::jacobi(q(0), q(0));
    auto [l, r] = christoffel_darboux_check(leg, Q(1), 3, q(1, 3), q(1, 7));
    CHECK(l == r);
    auto lag = ClassicalBase<Q>::laguerre(q(1));
    auto [l2, r2] = christoffel_darboux_check(lag, Q(0), 2, q(1, 3), q(1, 7));
    CHECK(l2 == r2);
    auto [l3, r3] = christoffel_darboux_check(leg, Q(-1), 4, q(2, 5), q(2, 5));
    CHECK(l3 == r3);
    auto jac = ClassicalBase<Q>::jacobi(q(1, 2), q(5, 3));
    for (long m = 0; m <= 5; ++m) {
        auto [a, b] = christoffel_darboux_check(jac, q(1, 4), m, q(-2, 3), q(3, 5));
        CHECK(a == b);
    }
}

TEST_CASE("biorthogonality of the divided family with its base") {
    auto leg = ClassicalBase<Q>::jacobi(q(0), q(0));
    auto s = leg.space();
    for (Q lam : {q(1), q(-1)})
        for (long n = 0; n <= 5; ++n)
            for (long m = 1; m <= 5; ++m) {
                auto [lhs, rhs] = biorthogonality(leg, lam, n, m);
                CHECK(lhs == rhs);
                Q want = m == n + 1 ? s.expect(Element<Q>::poly(leg.monic(m)) * Element<Q>::poly(leg.monic(m))) : Q(0);
                CHECK(lhs == want);
            }
}

TEST_CASE("divided-family norms against exact moments and quadrature") {
    for (auto [a, b] : std::vector<std::pair<Q, Q>>{{q(0), q(0)}, {q(1, 2), q(-1, 3)}, {q(-1, 2), q(-1, 2)}, {q(2), q(5, 4)}}) {
        auto d = FD::jacobi_divided(a, b, 1);
        auto op = family_op(d);
        for (long n = 0; n <= 5; ++n) CHECK(op.var(family_poly(d, n)) == family_norm(d, n));
    }
    for (Q al : {q(0), q(1), q(-1, 2), q(5, 3)}) {
        auto d = FD::laguerre_divided(al);
        auto op = family_op(d);
        for (long n = 0; n <= 5; ++n) CHECK(op.var(family_poly(d, n)) == family_norm(d, n));
    }
    for (int k = 1; k <= 4; ++k) {
        auto d = FD::chebyshev_divided(k);
        auto op = family_op(d);
        for (long n = 0; n <= 5; ++n) CHECK(op.var(family_poly(d, n)) == family_norm(d, n));
    }

    // Direct quadrature with endpoint-flattening substitutions, independent of the moment code.
    // integral(g, A, B) = int_{-1}^{1} g(x) (1-x)^A (1+x)^B dx
    auto integral = [](const std::function<double(double)>& g, double A, double B) {
        double left = quad::adaptive(
                          [&](double v) {
                              double y = std::pow(v, 1 / (A + 1));
                              return g(1 - 2 * y) * std::pow(1 - y, B);
                          },
                          0.0, std::pow(0.5, A + 1))
                          .value / (A + 1);
        double right = quad::adaptive(
                           [&](double v) {
                               double u = std::pow(v, 1 / (B + 1));
                               return g(2 * u - 1) * std::pow(1 - u, A);
                           },
                           0.0, std::pow(0.5, B + 1))
                           .value / (B + 1);
        return std::pow(2.0, A + B + 1) * (left + right);
    };
    for (auto [al, be] : std::vector<std::pair<double, double>>{{0, 0}, {0.5, -0.3}, {-0.5, -0.5}, {1.7, 2.2}, {-0.8, 0.4}})
        for (long n = 0; n <= 5; ++n) {
            auto qc = jacobi_divided_hyp(al, be, n);
            auto pq = [&](double x) { return poly::eval(qc, x); };
            double m0 = integral([](double) { return 1.0; }, al + 2, be);
            double qq = integral([&](double x) { return pq(x) * pq(x); }, al + 2, be) / m0;
            double qz = integral(pq, al + 1, be) / m0;
            double zz = integral([](double) { return 1.0; }, al, be) / m0;
            double var = qq - qz * qz / zz;
            CHECK(var == doctest::Approx(jacobi_divided_norm(al, be, n)).epsilon(1e-9));
        }
}

TEST_CASE("Float families at the mirrored endpoint and the shifted Chebyshev family") {
    using FDd = FamilyDescriptor<double>;
    auto d = FDd::jacobi_divided(0.5, -0.25, -1);
    auto op = family_op(d);
    for (long n = 0; n <= 4; ++n) {
        CHECK(op.var(family_poly(d, n)) == doctest::Approx(family_norm(d, n)).epsilon(1e-9));
        for (long m = 0; m < n; ++m) CHECK(std::fabs(op.cov(family_poly(d, n), family_poly(d, m))) < 1e-9);
    }
    CHECK_THROWS_AS(family_op(FD::jacobi_divided(q(1, 2), q(0), -1)), NotExact);

    for (double lam : {0.0, 0.5, -0.3, 1.0}) {
        auto s = FDd::chebyshev_shift(lam);
        auto sop = family_op(s);
        for (long n = 0; n <= 4; ++n) {
            CHECK(sop.var(family_poly(s, n)) == doctest::Approx(family_norm(s, n)).epsilon(1e-9));
            for (long m = 0; m < n; ++m) CHECK(std::fabs(sop.cov(family_poly(s, n), family_poly(s, m))) < 1e-9);
        }
    }
    CHECK_THROWS_AS(family_op(FD::chebyshev_shift(q(0))), NotExact);
}

TEST_CASE("shifted Chebyshev recurrence and roots") {
    for (Q lam : {q(0), q(1, 2), q(-2, 3), q(1)}) {
        auto s = FD::chebyshev_shift(lam);
        poly::Coeffs<Q> prev, cur = family_coeffs(s, 0);
        CHECK(cur == std::vector<Q>{q(1)});
        for (long n = 0; n < 6; ++n) {
            Q t = poly::eval(ClassicalBase<Q>::jacobi(q(-1, 2), q(-1, 2)).monic(n + 1), lam) * pow_int(Q(2), n);
            auto next = poly::add(poly::mul(cur, poly::Coeffs<Q>{q(0), q(2)}), prev, Q(-1));
            next = poly::add(next, poly::Coeffs<Q>{Q(2 * t)});
            CHECK(next == family_coeffs(s, n + 1));
            prev = cur;
            cur = next;
        }
    }
    for (long n = 1; n <= 7; ++n) {
        auto c = family_coeffs(FamilyDescriptor<double>::chebyshev_shift(0.0), n);
        CHECK(c.back() == doctest::Approx(std::pow(2.0, n)));
        for (long k = 1; k <= n; ++k) CHECK(std::fabs(poly::eval(c, -std::sin(2 * k * M_PI / (n + 1)))) < 1e-9);
    }
}

TEST_CASE("Chebyshev divided families factor over cosine roots") {
    using FDd = FamilyDescriptor<double>;
    for (long n = 1; n <= 8; ++n) {
        auto k1 = family_coeffs(FDd::chebyshev_divided(1), n);
        CHECK(k1.back() == doctest::Approx(1.0));
        for (long k = 1; k <= n; ++k) CHECK(std::fabs(poly::eval(k1, std::cos(2 * k * M_PI / (n + 1)))) < 1e-9);
        auto k3 = family_coeffs(FDd::chebyshev_divided(3), n);
        for (long k = 1; k <= n / 2; ++k) CHECK(std::fabs(poly::eval(k3, std::cos(2 * k * M_PI / (n + 1)))) < 1e-9);
        for (long k = 1; k <= (n + 1) / 2; ++k) CHECK(std::fabs(poly::eval(k3, std::cos(2 * k * M_PI / (n + 2)))) < 1e-9);
    }
}

TEST_CASE("norm limits") {
    auto d = FamilyDescriptor<double>::beta_power(1e8);
    for (long n = 0; n <= 4; ++n) CHECK(family_norm(d, n) == doctest::Approx(1.0 / (2 * n + 1)).epsilon(1e-7));
    for (long n = 0; n <= 2; ++n) CHECK(family_norm(FD::beta_power(q(3)), n) == q(9, 16) / (2 * n + 1));
}
