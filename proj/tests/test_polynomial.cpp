#include "bvlab/polynomial.hpp"
#include "bvlab/series.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace bvlab;
using testutil::random_poly;

namespace {

struct Algebra : ::testing::Test {
    Context ctx;
    VarId phi, psi, th1, th2, th3;

    Algebra() {
        SymbolInfo s;
        s.name = "phi";
        s.role = Role::Mode;
        s.spacetime = false;
        phi = ctx.var(ctx.declare(s));
        s.name = "psi";
        psi = ctx.var(ctx.declare(s));
        s.name = "th1";
        s.grading = {1, 0, 0};
        th1 = ctx.var(ctx.declare(s));
        s.name = "th2";
        th2 = ctx.var(ctx.declare(s));
        s.name = "th3";
        th3 = ctx.var(ctx.declare(s));
    }

    Polynomial v(VarId x) const { return Polynomial::variable(x); }
};

TEST_F(Algebra, OddSquareVanishes) {
    EXPECT_TRUE(mul(v(th1), v(th1)).is_zero());
    Polynomial p = v(th1) + v(phi);
    Polynomial p2 = mul(p, p);
    // theta^2 drops, cross terms survive: phi^2 + 2 phi theta? no: theta phi + phi theta = 2 phi theta
    EXPECT_EQ(p2, mul(v(phi), v(phi)) + mul(v(phi), v(th1)) * Scalar(Rat(2)));
}

TEST_F(Algebra, GradedCommutativity) {
    EXPECT_EQ(mul(v(th1), v(th2)), mul(v(th2), v(th1)) * Scalar(-1));
    EXPECT_EQ(mul(v(phi), v(th1)), mul(v(th1), v(phi)));
}

TEST_F(Algebra, HandExpansionExample) {
    // (phi + th1 th2) * phi = phi^2 + th1 th2 phi
    Polynomial a = v(phi) + mul(v(th1), v(th2));
    Polynomial r = mul(a, v(phi));
    Polynomial want = mul(v(phi), v(phi)) + mul(mul(v(th1), v(th2)), v(phi));
    EXPECT_EQ(r, want);
}

TEST_F(Algebra, LeftRightDerivativeExamples) {
    Polynomial t12 = mul(v(th1), v(th2));
    EXPECT_EQ(t12.deriv_left(th1), v(th2));
    EXPECT_EQ(t12.deriv_right(th1), -v(th2));
    EXPECT_EQ(t12.deriv_left(th2), -v(th1));
    Polynomial phi3 = v(phi).pow(3);
    EXPECT_EQ(phi3.deriv_left(phi), v(phi).pow(2) * Scalar(Rat(3)));
}

TEST_F(Algebra, GradedCommutativityProperty) {
    std::mt19937_64 rng(7);
    std::vector<VarId> vars{phi, psi, th1, th2, th3};
    for (int t = 0; t < 1000; ++t) {
        Polynomial p = random_poly(rng, vars, 3, 3, t % 2);
        Polynomial q = random_poly(rng, vars, 3, 3, (t / 2) % 2);
        Polynomial lhs = mul(p, q);
        Polynomial rhs = mul(q, p);
        if ((t % 2) == 1 && ((t / 2) % 2) == 1) rhs = -rhs;
        EXPECT_EQ(lhs, rhs) << "trial " << t;
    }
}

TEST_F(Algebra, Associativity) {
    std::mt19937_64 rng(11);
    std::vector<VarId> vars{phi, psi, th1, th2, th3};
    for (int t = 0; t < 300; ++t) {
        Polynomial a = random_poly(rng, vars, 3, 3);
        Polynomial b = random_poly(rng, vars, 3, 3);
        Polynomial c = random_poly(rng, vars, 3, 3);
        EXPECT_EQ(mul(mul(a, b), c), mul(a, mul(b, c)));
    }
}

TEST_F(Algebra, LeibnizLeft) {
    std::mt19937_64 rng(13);
    std::vector<VarId> vars{phi, psi, th1, th2, th3};
    for (int t = 0; t < 500; ++t) {
        int pp = t % 2;
        Polynomial p = random_poly(rng, vars, 3, 3, pp);
        Polynomial q = random_poly(rng, vars, 3, 3);
        for (VarId x : {th1, phi}) {
            Polynomial lhs = mul(p, q).deriv_left(x);
            Polynomial rhs = mul(p.deriv_left(x), q);
            Polynomial cross = mul(p, q.deriv_left(x));
            if (x.odd() && pp == 1) cross = -cross;
            rhs += cross;
            EXPECT_EQ(lhs, rhs) << "trial " << t;
        }
    }
}

TEST_F(Algebra, LeftRightExchange) {
    // dL F = (-1)^{(1+eps_F) eps_K} dR F for homogeneous F
    std::mt19937_64 rng(17);
    std::vector<VarId> vars{phi, psi, th1, th2, th3};
    for (int t = 0; t < 500; ++t) {
        int pf = t % 2;
        Polynomial f = random_poly(rng, vars, 4, 3, pf);
        for (VarId x : {phi, th1, th2}) {
            Polynomial lhs = f.deriv_left(x);
            Polynomial rhs = f.deriv_right(x);
            if (x.odd() && ((1 + pf) & 1)) rhs = -rhs;
            EXPECT_EQ(lhs, rhs) << "trial " << t;
        }
    }
}

TEST_F(Algebra, SecondDerivativesCommuteGraded) {
    std::mt19937_64 rng(19);
    std::vector<VarId> vars{phi, psi, th1, th2, th3};
    for (int t = 0; t < 300; ++t) {
        Polynomial f = random_poly(rng, vars, 4, 4);
        for (VarId x : {phi, th1})
            for (VarId y : {psi, th2}) {
                Polynomial lhs = f.deriv_left(x).deriv_left(y);
                Polynomial rhs = f.deriv_left(y).deriv_left(x);
                if (x.odd() && y.odd()) rhs = -rhs;
                EXPECT_EQ(lhs, rhs);
                // mixed L/R: dL dR F / dK dL = dR dL F / dL dK
                Polynomial m1 = f.deriv_right(y).deriv_left(x);
                Polynomial m2 = f.deriv_left(x).deriv_right(y);
                EXPECT_EQ(m1, m2);
            }
    }
}

TEST_F(Algebra, GradingQueries) {
    SymbolInfo s;
    s.name = "c";
    s.role = Role::Ghost;
    s.grading = {1, 1, 0};
    s.spacetime = false;
    s.has_antifield = true;
    VarId c = ctx.var(ctx.declare(s));
    s.name = "cbar";
    s.grading = {1, -1, 0};
    VarId cbar = ctx.var(ctx.declare(s));
    s.name = "phi0";
    s.role = Role::Field;
    s.grading = {0, 0, 0};
    VarId f = ctx.var(ctx.declare(s));
    VarId faf = ctx.var(ctx.info(f).sym, true);

    auto g1 = mul(Polynomial::variable(c), Polynomial::variable(cbar)).grading(ctx);
    ASSERT_TRUE(g1.has_value());
    EXPECT_EQ(g1->parity, 0);
    EXPECT_EQ(g1->ghost, 0);
    EXPECT_EQ(g1->antifield, 0);

    auto g2 = Polynomial::variable(faf).grading(ctx);
    ASSERT_TRUE(g2.has_value());
    EXPECT_EQ(g2->parity, 1);
    EXPECT_EQ(g2->ghost, -1);
    EXPECT_EQ(g2->antifield, 1);

    auto g3 = (Polynomial::variable(f) + Polynomial::variable(c)).grading(ctx);
    EXPECT_FALSE(g3.has_value());
}

TEST_F(Algebra, HbarSeriesRing) {
    std::mt19937_64 rng(23);
    std::vector<VarId> vars{phi, psi, th1, th2};
    for (int t = 0; t < 100; ++t) {
        HbarSeries a = HbarSeries::hbar_power(random_poly(rng, vars, 2, 2), t % 3, 6);
        a += HbarSeries{random_poly(rng, vars, 2, 2), 6};
        HbarSeries b = HbarSeries::hbar_power(random_poly(rng, vars, 2, 2), (t + 1) % 4, 6);
        HbarSeries c = HbarSeries{random_poly(rng, vars, 2, 2), 6};
        EXPECT_EQ(((a * b) * c), (a * (b * c)));
        EXPECT_EQ(a * (b + c), a * b + a * c);
    }
    // truncation drops high orders
    HbarSeries h = HbarSeries::hbar_power(Polynomial{Scalar(1)}, 5, 6);
    EXPECT_TRUE((h * h).is_zero());
    // classical times classical stays classical
    HbarSeries x{random_poly(rng, vars, 3, 3), 6};
    HbarSeries y{random_poly(rng, vars, 3, 3), 6};
    EXPECT_TRUE((x * y).is_classical());
}

TEST_F(Algebra, LeftCoefficientExtraction) {
    // p = th1 * (phi psi) + ...: extracting th1 moves it leftwards with sign
    Polynomial p = mul(v(phi), mul(v(th1), v(th2)));
    Monomial pat;
    pat.factors = {{th1, 1}};
    // phi th1 th2 = -th1 phi th2 ... extraction of th1: coefficient -... sign:
    // moving th1 left across phi (even): no sign
    EXPECT_EQ(p.left_coefficient(pat), mul(v(phi), v(th2)));
    Polynomial q = mul(v(th2), v(th1));
    EXPECT_EQ(q.left_coefficient(pat), -v(th2));
}

} // namespace
