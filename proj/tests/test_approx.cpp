#include <doctest.h>

#include <cmath>
#include <random>

#include "pvar/approx.hpp"
#include "pvar/odsolve.hpp"
#include "support.hpp"

using namespace pvar;
using Q = Rational;
using testing_support::q;
using testing_support::random_rational;

namespace {

std::vector<Element<Q>> monomials(long n) {
    std::vector<Element<Q>> v;
    for (long k = 0; k <= n; ++k) v.push_back(Element<Q>::monomial(k));
    return v;
}

Element<Q> random_poly(std::mt19937_64& rng, long degree) {
    std::vector<Q> c;
    for (long k = 0; k <= degree; ++k) c.push_back(random_rational(rng, -3, 3, 5));
    return Element<Q>::poly(c);
}

}  // namespace

TEST_CASE("sqrt(1-x) fit on [0,1] is independent of lambda and p") {
    Element<Q> y = Element<Q>::power_product(Q(0), Q(1, 2));
    for (long lam : {0L, 1L, 2L}) {
        for (Q p : {Q(0), Q(1, 2), Q(1)}) {
            PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::monomial(lam), p);
            auto r = fit(op, monomials(2), y);
            CHECK(r.coefficients[0] == Q(34, 35));
            CHECK(r.coefficients[1] == Q(-8, 35));
            CHECK(r.coefficients[2] == Q(-4, 7));
            CHECK(op.with_p(Q(1)).var(y - r.approximant) == Q(1, 2450));
        }
    }
}

TEST_CASE("constant Z at p = 1 flags the intercept as free") {
    PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::constant(Q(1)), Q(1));
    auto r = fit(op, monomials(2), Element<Q>::power_product(Q(0), Q(1, 2)));
    REQUIRE(r.degenerate_free_params.size() == 1);
    CHECK(r.degenerate_free_params[0] == 0);
}

TEST_CASE("lambda = 1/2 at p = 1 beats the polynomial-Z residual") {
    const double pi = M_PI;
    PCovOp<double> op(ProbSpace<double>::uniform01(), Element<double>::power(0.5), 1.0);
    std::vector<Element<double>> basis{Element<double>::monomial(0), Element<double>::monomial(1),
                                       Element<double>::monomial(2)};
    auto r = fit(op, basis, Element<double>::power_product(0.0, 0.5));
    CHECK(r.coefficients[0] == doctest::Approx(166 - 105 * pi / 2).epsilon(1e-9));
    CHECK(r.coefficients[1] == doctest::Approx(1320 - 420 * pi).epsilon(1e-9));
    CHECK(r.coefficients[2] == doctest::Approx(-(1652.0 / 3 - 175 * pi)).epsilon(1e-9));
    CHECK(r.residual_var_p == doctest::Approx(0.000282929186007540).epsilon(1e-8));
    CHECK(r.residual_var_p < 1.0 / 2450);
}

TEST_CASE("assembled systems for the square-root example") {
    Element<Q> y = Element<Q>::power_product(Q(0), q(1, 2));
    for (Q p : {Q(0), q(1, 2), Q(1)}) {
        PCovOp<Q> flat(ProbSpace<Q>::uniform01(), Element<Q>::constant(Q(1)), p);
        auto [m0, r0] = assemble_system(flat, monomials(2), y);
        CHECK(m0[0] == std::vector<Q>{1 - p, (1 - p) / 2, (1 - p) / 3});
        PCovOp<Q> half(ProbSpace<Q>::uniform01(), Element<Q>::power(q(1, 2)), p);
        auto m1 = cov_matrix(half, monomials(2), 3);
        CHECK(m1[0] == std::vector<Q>{1 - 8 * p / 9, q(1, 2) - 8 * p / 15, q(1, 3) - 8 * p / 21});
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(m1[i][i] >= Q(0));
            for (std::size_t j = 0; j < 3; ++j) CHECK(m1[i][j] == m1[j][i]);
        }
    }
    PCovOp<Q> zero(ProbSpace<Q>::uniform01(), Element<Q>::power(q(1, 2)), Q(0));
    auto [h, r] = assemble_system(zero, monomials(3), y);
    for (long i = 0; i <= 3; ++i)
        for (long j = 0; j <= 3; ++j) CHECK(h[i][j] == q(1, i + j + 1));
}

TEST_CASE("least p-variance residuals are ordered in p") {
    std::mt19937_64 rng(61);
    std::vector<ProbSpace<Q>> spaces{ProbSpace<Q>::uniform01(), ProbSpace<Q>::beta(q(1, 2), Q(1)),
                                     ProbSpace<Q>::discrete({Q(0), q(1, 5), q(1, 2), q(3, 4), Q(1)}, {})};
    for (int t = 0; t < 200; ++t) {
        const auto& s = spaces[static_cast<std::size_t>(t) % spaces.size()];
        Element<Q> z = random_poly(rng, 1);
        if (s.expect_product(z, z) == Q(0)) z = Element<Q>::constant(Q(1));
        auto y = random_poly(rng, 4);
        std::vector<Element<Q>> basis{random_poly(rng, 1), random_poly(rng, 2)};
        PCovOp<Q> op(s, z, Q(0));
        Q v1 = fit(op.with_p(Q(1)), basis, y).residual_var_p;
        auto mid = fit(op.with_p(q(1, 2)), basis, y);
        auto ls = fit(op, basis, y);
        CHECK(v1 >= Q(0));
        CHECK(v1 <= mid.residual_var_p);
        CHECK(mid.residual_var_p <= ls.residual_var_p);
        CHECK(ls.residual_var_p == ls.residual_ls);
        CHECK(mid.residual_var_p <= mid.residual_ls);
    }
}

TEST_CASE("Z orthogonal to the basis makes the fit independent of p") {
    std::mt19937_64 rng(62);
    Element<Q> z = Element<Q>::poly({Q(0), q(-3, 5), Q(0), Q(1)});
    auto s = ProbSpace<Q>::jacobi(Q(0), Q(0));
    auto y = random_poly(rng, 5);
    auto base = fit(PCovOp<Q>(s, z, Q(0)), monomials(2), y).coefficients;
    for (Q p : {q(1, 4), q(2, 3), Q(1)}) CHECK(fit(PCovOp<Q>(s, z, p), monomials(2), y).coefficients == base);
}

TEST_CASE("constant Z with an intercept reproduces ordinary regression") {
    std::mt19937_64 rng(63);
    auto s = ProbSpace<Q>::beta(q(1, 3), Q(0));
    auto y = random_poly(rng, 4);
    auto base = fit(PCovOp<Q>(s, Element<Q>::constant(Q(2)), Q(0)), monomials(2), y);
    for (Q p : {q(1, 3), q(9, 10), Q(1)}) {
        auto r = fit(PCovOp<Q>(s, Element<Q>::constant(Q(2)), p), monomials(2), y);
        CHECK(r.coefficients == base.coefficients);
        CHECK(r.degenerate_free_params.empty() == (p != Q(1)));
    }
}

TEST_CASE("discrete regression matches the overdetermined solver") {
    std::mt19937_64 rng(64);
    std::vector<Q> xs{Q(0), q(1, 3), q(1, 2), Q(1), Q(2), q(5, 2)};
    auto s = ProbSpace<Q>::discrete(xs, {});
    for (Q p : {Q(0), q(1, 2), Q(1)}) {
        std::vector<Q> yv, zv;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            yv.push_back(random_rational(rng, -5, 5, 3));
            zv.push_back(random_rational(rng, 1, 3, 2));
        }
        PCovOp<Q> op(s, Element<Q>::values(zv), p);
        auto r = fit(op, monomials(2), Element<Q>::values(yv));
        OverdeterminedProblem<Q> pr;
        for (const auto& x : xs) pr.A.push_back({Q(1), x, x * x});
        pr.b = yv;
        pr.z = zv;
        pr.p = p;
        CHECK(r.coefficients == pv_solve(pr));
    }
}

TEST_CASE("expansion on an uncorrelated basis reconstructs polynomials") {
    std::mt19937_64 rng(65);
    for (Q p : {Q(0), q(1, 2), Q(1)}) {
        PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::power(q(1, 2)), p);
        auto b = gram_schmidt_p(op, monomials(4));
        auto w = random_poly(rng, 4);
        auto r = expand(op, b, w, 4);
        CHECK(r.residual_var_p == Q(0));
        CHECK(r.approximant.coeffs() == w.coeffs());
    }
}

TEST_CASE("degree-2 expansion covariances against x^r") {
    for (Q r : {q(1, 2), q(5, 2), Q(4)}) {
        PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::power(r), Q(1));
        auto b = gram_schmidt_p(op, monomials(2));
        // P_k scaled to P_k(0) = 1
        std::vector<Element<Q>> pk;
        for (const auto& e : b.elements) pk.push_back(e * Q(1 / e.coeffs()[0]));
        CHECK(pk[1].coeffs() == std::vector<Q>{Q(1), -2 * r * (r + 2) / (r * r - 1)});
        CHECK(pk[2].coeffs() ==
              std::vector<Q>{Q(1), -6 * r * (r + 2) / (r * r - 1), 6 * r * (r + 3) / ((r - 2) * (r + 1))});
        Q ta = r * (r - 2) / ((r + 1) * (r + 3)), tb = r * (r - 1) / ((r + 1) * (r + 2));
        for (Q a : {Q(1), q(-3, 2)}) {
            Q bb = Q(-1), c = q(2, 7);
            Element<Q> f = Element<Q>::poly({c, bb, a});
            CHECK(op.cov(f, pk[0]) == ta * a / 3 + tb * bb / 2 + r * r / ((r + 1) * (r + 1)) * c);
            CHECK(op.cov(f, pk[1]) == -ta * a / 6 - tb * bb / 6);
            CHECK(op.cov(f, pk[2]) == q(1, 30) * ta * a);
            Element<Q> sum;
            for (long k = 0; k <= 2; ++k) sum += pk[k] * Q((2 * k + 1) * (r + 1) * (r + 1) / (r * r) * op.cov(f, pk[k]));
            CHECK(sum.coeffs() == f.coeffs());
        }
    }
}

TEST_CASE("residual identity and partial correlation sums") {
    std::mt19937_64 rng(66);
    for (int t = 0; t < 3; ++t) {
        Q p = random_rational(rng, 0, 1, 5);
        PCovOp<Q> op(ProbSpace<Q>::beta(q(1, 2), Q(0)), Element<Q>::power(q(2, 3)), p);
        std::vector<Element<Q>> v;
        for (long k = 0; k <= 3; ++k) v.push_back(random_poly(rng, k) + Element<Q>::monomial(k));
        auto b = gram_schmidt_p(op, v);
        auto y = random_poly(rng, 5);
        for (long n = 0; n <= 3; ++n) {
            auto id = residual_identity_check(op, b, y, n);
            CHECK(id.lhs == id.rhs);
            CHECK(id.rho_sq_sum <= Q(1));
            CHECK(id.lhs == op.var(y) * (1 - id.rho_sq_sum));
        }
    }
}

TEST_CASE("companion least squares coincides with the p-variance expansion") {
    std::mt19937_64 rng(67);
    auto s = ProbSpace<Q>::uniform01();
    auto y = random_poly(rng, 5);
    for (Q p : {Q(1), q(3, 4), q(5, 9)}) {
        PCovOp<Q> op(s, Element<Q>::power(q(1, 2)), p);
        auto b = gram_schmidt_p(op, monomials(3));
        auto g = orthogonal_companion(op, b);
        auto ex = expand(op, b, y, 3);
        // the target enters through its own companion, which is y itself at p = 1
        Element<Q> ty = op.companion(y);
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(s.expect_product(ty, g[k]) / s.expect_product(g[k], g[k]) == ex.coefficients[k]);
    }
    PCovOp<Q> one(s, Element<Q>::power(q(1, 2)), Q(1));
    auto b = gram_schmidt_p(one, monomials(3));
    auto g = orthogonal_companion(one, b);
    auto ex = expand(one, b, y, 3);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(s.expect_product(y, g[k]) / s.expect_product(g[k], g[k]) == ex.coefficients[k]);
}

TEST_CASE("recurrence coefficients") {
    PCovOp<Q> leg(ProbSpace<Q>::jacobi(Q(0), Q(0)), Element<Q>::monomial(1), Q(0));
    auto b = gram_schmidt_p(leg, monomials(6));
    for (long n = 1; n <= 4; ++n) {
        auto c = recurrence_coeffs(leg, b, n);
        for (long k = 0; k < n - 1; ++k) CHECK(c[k] == Q(0));
        CHECK(c[n + 1] == Q(1));
    }
    for (Q r : {q(1, 2), q(7, 3)}) {
        PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::power(r), Q(1));
        auto pb = gram_schmidt_p(op, monomials(3));
        auto c = recurrence_coeffs(op, pb, 2);
        Element<Q> sum;
        for (long k = 0; k <= 3; ++k) sum += pb.elements[k] * c[k];
        CHECK(sum.coeffs() == times_x(pb.elements[2]).coeffs());
        CHECK(c[3] == Q(1));
    }
}
