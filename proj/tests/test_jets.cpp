#include "bvlab/jets.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace bvlab;
using testutil::random_poly;

namespace {

struct Jets : ::testing::Test {
    Context ctx;
    SymId phi_s, th_s, m_s;
    VarId phi, th, m;

    Jets() {
        ctx.set_dim(2);
        ctx.jet_order = 3;
        SymbolInfo s;
        s.name = "phi";
        s.role = Role::Field;
        s.has_antifield = true;
        phi_s = ctx.declare(s);
        phi = ctx.var(phi_s);
        s.name = "th";
        s.grading = {1, 0, 0};
        th_s = ctx.declare(s);
        th = ctx.var(th_s);
        SymbolInfo c;
        c.name = "m";
        c.role = Role::Coupling;
        c.spacetime = false;
        c.has_antifield = false;
        m_s = ctx.declare(c);
        m = ctx.var(m_s);
    }

    Polynomial v(VarId x) const { return Polynomial::variable(x); }
    VarId jet(SymId s, std::vector<int> d, bool af = false) {
        return ctx.var(s, af, {}, std::move(d));
    }
    std::vector<VarId> field_vars() {
        return {phi, th, jet(phi_s, {0}), jet(phi_s, {1}), jet(th_s, {0}), jet(th_s, {1}),
                ctx.var(phi_s, true), ctx.var(th_s, true)};
    }
};

TEST_F(Jets, TotalDerivativeChainRule) {
    Polynomial p = v(phi).pow(2);
    Polynomial want = mul(v(jet(phi_s, {0})), v(phi)) * Scalar(Rat(2));
    EXPECT_EQ(total_derivative(ctx, p, 0), want);
    EXPECT_TRUE(total_derivative(ctx, Polynomial{Scalar(1)}, 0).is_zero());
    // graded Leibniz without signs: d(th*phi) = th' phi + th phi'
    Polynomial q = mul(v(th), v(phi));
    Polynomial dq = total_derivative(ctx, q, 1);
    Polynomial want2 = mul(v(jet(th_s, {1})), v(phi)) + mul(v(th), v(jet(phi_s, {1})));
    EXPECT_EQ(dq, want2);
}

TEST_F(Jets, DerivativesCommute) {
    std::mt19937_64 rng(3);
    auto vars = field_vars();
    for (int t = 0; t < 100; ++t) {
        Polynomial p = random_poly(rng, vars, 3, 3);
        Polynomial d01 = total_derivative_unchecked(ctx, total_derivative_unchecked(ctx, p, 0), 1);
        Polynomial d10 = total_derivative_unchecked(ctx, total_derivative_unchecked(ctx, p, 1), 0);
        EXPECT_EQ(d01, d10);
    }
}

TEST_F(Jets, JetOverflowError) {
    Polynomial p = v(jet(phi_s, {0, 0, 1}));
    EXPECT_THROW(total_derivative(ctx, p, 1), JetOverflow);
}

TEST_F(Jets, EulerLagrangeKleinGordon) {
    // den = 1/2 (d phi)^2 - 1/2 m^2 phi^2 with both-covariant metric contraction
    Polynomial den;
    for (int mu = 0; mu < ctx.dim; ++mu)
        den += mul(v(jet(phi_s, {mu})), v(jet(phi_s, {mu}))) *
               (Scalar(ctx.metric[mu]) * Scalar::ratio(1, 2));
    den -= mul(v(m).pow(2), v(phi).pow(2)) * Scalar::ratio(1, 2);
    Polynomial el = euler_lagrange(ctx, den, {phi_s, false, {}});
    Polynomial want;
    for (int mu = 0; mu < ctx.dim; ++mu)
        want -= v(jet(phi_s, {mu, mu})) * Scalar(ctx.metric[mu]);
    want -= mul(v(m).pow(2), v(phi));
    EXPECT_EQ(el, want);
}

TEST_F(Jets, EulerLagrangeKillsDivergences) {
    std::mt19937_64 rng(5);
    auto vars = field_vars();
    for (int t = 0; t < 200; ++t) {
        Polynomial x = random_poly(rng, vars, 3, 3);
        Polynomial div = total_derivative_unchecked(ctx, x, t % 2);
        for (const FieldComponent& fc : all_components(ctx))
            EXPECT_TRUE(euler_lagrange(ctx, div, fc).is_zero()) << "trial " << t;
    }
}

TEST_F(Jets, EulerLagrangeAntifield) {
    // EL_L of phi^sharp phi w.r.t. phi^sharp is phi
    Polynomial den = mul(v(ctx.var(phi_s, true)), v(phi));
    EXPECT_EQ(euler_lagrange(ctx, den, {phi_s, true, {}}, Side::Left), v(phi));
}

TEST_F(Jets, ZeroFunctionalCertificate) {
    // explicit divergence integrates to zero
    Polynomial x = mul(v(phi), v(jet(phi_s, {1})));
    Polynomial div = total_derivative_unchecked(ctx, x, 0);
    EXPECT_TRUE(is_zero_functional(ctx, {div}).zero);

    // int phi^2 is not zero; residual is 2 phi
    ZeroCheck zc = is_zero_functional(ctx, {v(phi).pow(2)});
    EXPECT_FALSE(zc.zero);
    ASSERT_EQ(zc.residuals.size(), 1u);
    EXPECT_EQ(zc.residuals[0].second, v(phi) * Scalar(Rat(2)));

    // d_mu phi d^mu phi + phi box phi is a total divergence
    Polynomial den;
    for (int mu = 0; mu < ctx.dim; ++mu) {
        den += mul(v(jet(phi_s, {mu})), v(jet(phi_s, {mu}))) * Scalar(ctx.metric[mu]);
        den += mul(v(phi), v(jet(phi_s, {mu, mu}))) * Scalar(ctx.metric[mu]);
    }
    EXPECT_TRUE(is_zero_functional(ctx, {den}).zero);

    // a constant density integrates to a nonzero functional
    ZeroCheck c = is_zero_functional(ctx, {Polynomial{Scalar(3)} + v(m).pow(2)});
    EXPECT_FALSE(c.zero);
    EXPECT_FALSE(c.constant_part.is_zero());
}

TEST_F(Jets, ZeroFunctionalInvariantUnderDivergences) {
    std::mt19937_64 rng(7);
    auto vars = field_vars();
    for (int t = 0; t < 100; ++t) {
        Polynomial f = random_poly(rng, vars, 2, 2);
        Polynomial x = random_poly(rng, vars, 2, 2);
        Polynomial div = total_derivative_unchecked(ctx, x, t % 2);
        EXPECT_EQ(is_zero_functional(ctx, {f}).zero, is_zero_functional(ctx, {f + div}).zero);
        EXPECT_TRUE(functionals_equal(ctx, {f}, {f + div}));
    }
}

} // namespace
