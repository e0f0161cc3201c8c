#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pvar/uncorrelate.hpp"
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
    for (long k = 0; k < degree; ++k) c.push_back(random_rational(rng, -3, 3, 4));
    c.push_back(Q(1));
    return Element<Q>::poly(c);
}

}  // namespace

TEST_CASE("p = 0 on [-1, 1] gives monic Legendre polynomials") {
    PCovOp<Q> op(ProbSpace<Q>::jacobi(Q(0), Q(0)), Element<Q>::monomial(1), Q(0));
    auto b = gram_schmidt_p(op, monomials(7));
    std::vector<Element<Q>> leg{Element<Q>::constant(Q(1)), Element<Q>::monomial(1)};
    for (long n = 1; n < 7; ++n)
        leg.push_back(times_x(leg[n]) - leg[n - 1] * q(n * n, 4 * n * n - 1));
    for (long n = 0; n <= 7; ++n) CHECK(b.elements[n].coeffs() == leg[n].coeffs());
}

TEST_CASE("first p = 1 element against x^r") {
    for (Q r : {q(1, 2), Q(2), q(5, 3)}) {
        PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::power(r), Q(1));
        auto b = gram_schmidt_p(op, monomials(1));
        Q shift = (r + 1) * ((r + 1) * (r + 2) - 2 * (2 * r + 1)) / (2 * (r + 2) * ((r + 1) * (r + 1) - (2 * r + 1)));
        CHECK(b.elements[1].coeffs() == std::vector<Q>{-shift, Q(1)});
    }
}

TEST_CASE("Z = x^5 at p = 1 leaves x^5 itself as the fifth element") {
    PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::monomial(5), Q(1));
    auto b = gram_schmidt_p(op, monomials(5));
    CHECK(b.elements[5].coeffs() == Element<Q>::monomial(5).coeffs());
    CHECK(b.variances[5] == Q(0));
}

TEST_CASE("integer power Z makes the p = 1 family finite") {
    PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::monomial(2), Q(1));
    CHECK_NOTHROW(gram_schmidt_p(op, monomials(2)));
    CHECK_THROWS_AS(gram_schmidt_p(op, monomials(3)), DegenerateBasis);
}

TEST_CASE("Gram determinants") {
    std::mt19937_64 rng(21);
    PCovOp<Q> op(ProbSpace<Q>::beta(q(1, 2), Q(0)), Element<Q>::power(q(3, 2)), q(2, 3));
    auto v = monomials(5);
    CHECK(gram_det(op, v, -1) == Q(1));
    CHECK(gram_det(op, v, 0) == op.var(v[0]));
    CHECK_THROWS_AS(gram_det(op, v, -2), ConstraintViolation);
    auto b = gram_schmidt_p(op, v);
    Q prod(1);
    for (long n = 0; n <= 5; ++n) {
        prod *= b.variances[n];
        Q d = gram_det(op, v, n);
        CHECK(d == prod);
        CHECK(d > Q(0));
        CHECK(op.var(b.elements[n]) == d / gram_det(op, v, n - 1));
    }
}

TEST_CASE("recursive and determinant constructions agree") {
    std::mt19937_64 rng(22);
    std::vector<ProbSpace<Q>> spaces{ProbSpace<Q>::uniform01(), ProbSpace<Q>::beta(q(1, 3), q(1, 2)),
                                     ProbSpace<Q>::jacobi(q(-1, 2), Q(1))};
    for (const auto& s : spaces)
        for (int trial = 0; trial < 3; ++trial) {
            // p = 1 would make X_1 proportional to the linear Z
            Q p = random_rational(rng, 0, 1, 6);
            if (p == Q(1)) p = q(1, 2);
            Q slope = random_rational(rng, -1, 1, 3);
            if (slope == Q(0)) slope = q(1, 3);
            Element<Q> z = Element<Q>::poly({random_rational(rng, 1, 3, 2), slope});
            PCovOp<Q> op(s, z, p);
            std::vector<Element<Q>> v;
            for (long k = 0; k <= 6; ++k) v.push_back(random_poly(rng, k));
            auto b = gram_schmidt_p(op, v);
            for (long n = 0; n <= 6; ++n) CHECK(element_by_determinant(op, v, n).coeffs() == b.elements[n].coeffs());
            CHECK(element_by_determinant(op, v, 0, false).coeffs() == v[0].coeffs());
        }
}

TEST_CASE("Gram-Schmidt output passes verification and a substituted source fails") {
    PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::power(q(1, 2)), q(1, 2));
    auto b = gram_schmidt_p(op, monomials(4));
    auto r = verify_basis(op, b);
    CHECK(r.pass);
    CHECK(r.max_offdiag == 0.0);
    b.elements[2] = b.sources[2];
    CHECK_FALSE(verify_basis(op, b).pass);
}

TEST_CASE("the basis element has minimal p-variance among monic combinations") {
    std::mt19937_64 rng(23);
    PCovOp<Q> op(ProbSpace<Q>::uniform01(), Element<Q>::power(q(1, 3)), q(3, 4));
    auto v = monomials(4);
    auto b = gram_schmidt_p(op, v);
    for (int trial = 0; trial < 100; ++trial) {
        Element<Q> c = v[4];
        for (long k = 0; k < 4; ++k) c += v[k] * random_rational(rng, -2, 2, 7);
        CHECK(b.variances[4] <= op.var(c));
    }
}

TEST_CASE("orthogonal companions") {
    PCovOp<Q> zero(ProbSpace<Q>::uniform01(), Element<Q>::monomial(1), Q(0));
    auto b0 = gram_schmidt_p(zero, monomials(3));
    auto g0 = orthogonal_companion(zero, b0);
    for (std::size_t k = 0; k < g0.size(); ++k) CHECK(g0[k].coeffs() == b0.elements[k].coeffs());

    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 5; ++trial) {
        Q a = random_rational(rng, 0, 2, 3), c = a + random_rational(rng, 1, 2, 5);
        if (num<Q>::is_integer(c - a)) c += q(1, 7);
        auto s = ProbSpace<Q>::beta(a, Q(0));
        for (Q p : {Q(1), q(3, 4)}) {
            PCovOp<Q> op(s, Element<Q>::power(c - a), p);
            auto b = gram_schmidt_p(op, monomials(3));
            auto g = orthogonal_companion(op, b);
            for (std::size_t i = 0; i < g.size(); ++i)
                for (std::size_t j = 0; j < g.size(); ++j)
                    CHECK(s.expect_product(g[i], g[j]) == (i == j ? b.variances[i] : Q(0)));
        }
    }
}

TEST_CASE("vector spaces support Gram-Schmidt") {
    PCovOp<Q> op(ProbSpace<Q>::vectors(2), Element<Q>::values({Q(1), Q(1)}), Q(1));
    auto b = gram_schmidt_p(op, {Element<Q>::values({Q(1), Q(0)}), Element<Q>::values({Q(0), Q(1)})});
    CHECK(b.elements[1].value_data() == std::vector<Q>{Q(1), Q(1)});
    CHECK(b.variances[1] == Q(0));
}

TEST_CASE("sine-cosine family is 1-uncorrelated against e^x") {
    const double pi = std::numbers::pi;
    auto s = ProbSpace<double>::continuous(0.0, pi, WeightSpec<double>::uniform());
    PCovOp<double> op(s, Element<double>::exponential(1.0), 1.0);
    for (double c1 : {1.0, -0.7}) {
        for (double lam : {0.0, 2.5}) {
            UncorrelatedBasis<double> b;
            for (int n = 1; n <= 5; ++n) {
                Element<double> phi = Element<double>::callable(
                                          [n](double x) { return std::sin(n * x) + n * std::cos(n * x); },
                                          "sin(nx)+n cos(nx)") *
                                          c1 +
                                      Element<double>::exponential(1.0) * lam;
                b.elements.push_back(phi);
                b.variances.push_back(op.var(phi));
                CHECK(b.variances.back() == doctest::Approx(c1 * c1 * (n * n + 1) / 2).epsilon(1e-9));
            }
            auto r = verify_basis(op, b);
            CHECK(r.max_offdiag <= 1e-9);
        }
    }
}
