#include "bvlab/theory.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace bvlab;
using testutil::random_poly;
using testutil::random_poly_nonzero;

namespace {

struct Antibracket : ::testing::Test {
    Context ctx;
    SymId phi_s, th_s;
    VarId phi, th, phiaf, thaf;

    Antibracket() {
        ctx.set_dim(2);
        SymbolInfo s;
        s.name = "phi";
        s.role = Role::Field;
        s.has_antifield = true;
        phi_s = ctx.declare(s);
        phi = ctx.var(phi_s);
        phiaf = ctx.var(phi_s, true);
        s.name = "th";
        s.grading = {1, 0, 0};
        th_s = ctx.declare(s);
        th = ctx.var(th_s);
        thaf = ctx.var(th_s, true);
    }

    Polynomial v(VarId x) const { return Polynomial::variable(x); }
    std::vector<VarId> jet_vars() {
        std::vector<VarId> vars{phi, th, phiaf, thaf};
        for (int mu = 0; mu < 2; ++mu) {
            vars.push_back(ctx.var(phi_s, false, {}, {mu}));
            vars.push_back(ctx.var(th_s, false, {}, {mu}));
            vars.push_back(ctx.var(phi_s, true, {}, {mu}));
            vars.push_back(ctx.var(th_s, true, {}, {mu}));
        }
        return vars;
    }
};

TEST_F(Antibracket, UnitPairingOnGenerators) {
    Polynomial F = v(phi) * Scalar(3);
    Polynomial G = v(phiaf) * Scalar(5);
    EXPECT_EQ(antibracket(ctx, F, G), Polynomial{Scalar(15)});
    // with the odd field
    Polynomial F2 = v(th);
    Polynomial G2 = v(thaf);
    EXPECT_EQ(antibracket(ctx, F2, G2), Polynomial{Scalar(1)});
}

TEST_F(Antibracket, RejectsMixedParity) {
    EXPECT_THROW(antibracket(ctx, v(phi) + v(th), v(phi)), MixedGrading);
}

TEST_F(Antibracket, GradedSymmetry) {
    std::mt19937_64 rng(29);
    auto vars = jet_vars();
    for (int t = 0; t < 200; ++t) {
        int pf = t % 2, pg = (t / 2) % 2;
        Polynomial F = random_poly(rng, vars, 3, 3, pf);
        Polynomial G = random_poly(rng, vars, 3, 3, pg);
        Polynomial lhs = antibracket(ctx, F, G);
        Polynomial rhs = antibracket(ctx, G, F);
        int sign = (pf + pg + pf * pg) & 1;
        if (sign) rhs = -rhs;
        EXPECT_TRUE(functionals_equal(ctx, {lhs}, {rhs})) << "trial " << t;
    }
}

TEST_F(Antibracket, LeibnizAtDensityLevel) {
    std::mt19937_64 rng(31);
    auto vars = jet_vars();
    for (int t = 0; t < 200; ++t) {
        int pf = t % 2, pg = (t / 2) % 2, ph = (t / 4) % 2;
        Polynomial F = random_poly(rng, vars, 2, 2, pf);
        Polynomial G = random_poly(rng, vars, 2, 2, pg);
        Polynomial H = random_poly(rng, vars, 2, 2, ph);
        Polynomial lhs = antibracket(ctx, F, mul(G, H));
        Polynomial rhs = mul(antibracket(ctx, F, G), H);
        Polynomial cross = mul(G, antibracket(ctx, F, H));
        if (((1 + pf) * pg) & 1) cross = -cross;
        rhs += cross;
        EXPECT_EQ(lhs, rhs) << "trial " << t;
    }
}

TEST_F(Antibracket, GradedJacobi) {
    std::mt19937_64 rng(37);
    auto vars = jet_vars();
    for (int t = 0; t < 60; ++t) {
        int pf = t % 2, pg = (t / 2) % 2, ph = (t / 4) % 2;
        Polynomial F = random_poly(rng, vars, 2, 2, pf);
        Polynomial G = random_poly(rng, vars, 2, 2, pg);
        Polynomial H = random_poly(rng, vars, 2, 2, ph);
        Polynomial sum;
        auto term = [&](const Polynomial& A, const Polynomial& B, const Polynomial& C, int pa,
                        int pc) {
            Polynomial r = antibracket(ctx, A, antibracket(ctx, B, C));
            if (((pa + 1) * (pc + 1)) & 1) r = -r;
            return r;
        };
        sum += term(F, G, H, pf, ph);
        sum += term(G, H, F, pg, pf);
        sum += term(H, F, G, ph, pg);
        EXPECT_TRUE(is_zero_functional(ctx, {sum}).zero) << "trial " << t;
    }
}

TEST_F(Antibracket, JacobiSpecialisation) {
    std::mt19937_64 rng(41);
    auto vars = jet_vars();
    for (int t = 0; t < 50; ++t) {
        Polynomial F = random_poly(rng, vars, 3, 3, 0);
        Polynomial r = antibracket(ctx, F, antibracket(ctx, F, F));
        EXPECT_TRUE(is_zero_functional(ctx, {r}).zero) << "trial " << t;
    }
}

TEST_F(Antibracket, GradingShift) {
    std::mt19937_64 rng(43);
    auto vars = jet_vars();
    for (int t = 0; t < 200; ++t) {
        Polynomial F = random_poly_nonzero(rng, vars, 1, 3);
        Polynomial G = random_poly_nonzero(rng, vars, 1, 3);
        Polynomial b = antibracket(ctx, F, G);
        if (b.is_zero()) continue;
        auto gf = F.grading(ctx), gg = G.grading(ctx), gb = b.grading(ctx);
        ASSERT_TRUE(gf && gg && gb);
        EXPECT_EQ(gb->ghost, gf->ghost + gg->ghost + 1);
        EXPECT_EQ(gb->antifield, gf->antifield + gg->antifield - 1);
        EXPECT_EQ(gb->parity, (gf->parity + gg->parity + 1) & 1);
    }
}

struct ScalarTheory : ::testing::Test {
    Context ctx;
    TheorySpec spec;
    SymId phi_s;
    VarId phi, phiaf;
    VarId lam;

    ScalarTheory() {
        ctx.set_dim(2);
        SymbolInfo s;
        s.name = "phi";
        s.role = Role::Field;
        s.has_antifield = true;
        phi_s = ctx.declare(s);
        phi = ctx.var(phi_s);
        phiaf = ctx.var(phi_s, true);
        SymbolInfo c;
        c.name = "lam";
        c.role = Role::Coupling;
        c.spacetime = false;
        lam = ctx.var(ctx.declare(c));
        // S0 = 1/2 (d phi)^2 - 1/2 phi^2 ; Sint = -lam/24 phi^4
        for (int mu = 0; mu < 2; ++mu)
            spec.S0 += mul(Polynomial::variable(ctx.var(phi_s, false, {}, {mu})),
                           Polynomial::variable(ctx.var(phi_s, false, {}, {mu}))) *
                       (Scalar(ctx.metric[mu]) * Scalar::ratio(1, 2));
        spec.S0 -= Polynomial::variable(phi).pow(2) * Scalar::ratio(1, 2);
        spec.Sint = mul(Polynomial::variable(lam), Polynomial::variable(phi).pow(4)) *
                    Scalar::ratio(-1, 24);
        spec.fields = {phi_s};
    }
};

TEST_F(ScalarTheory, MasterEquationHolds) {
    EXPECT_TRUE(check_master_equation(ctx, spec).pass);
}

TEST_F(ScalarTheory, KoszulTateLayer) {
    auto layers = antifield_layers(ctx, spec);
    ASSERT_FALSE(layers.empty());
    ASSERT_EQ(layers[0].k, -1);
    // s^(-1) phi^sharp = dR S / d phi, s^(-1) phi = 0
    Polynomial got = apply_layer(ctx, layers[0], Polynomial::variable(phiaf));
    Polynomial want = euler_lagrange(ctx, spec.total_action(), {phi_s, false, {}}, Side::Right);
    EXPECT_EQ(got, want);
    EXPECT_TRUE(apply_layer(ctx, layers[0], Polynomial::variable(phi)).is_zero());
}

TEST_F(ScalarTheory, BrstOnScalar) {
    EXPECT_TRUE(brst(ctx, spec, Polynomial::variable(phi)).is_zero());
    Polynomial s_af = brst(ctx, spec, Polynomial::variable(phiaf));
    EXPECT_FALSE(s_af.is_zero());
    // s^2 = 0 on generators
    EXPECT_TRUE(is_zero_functional(ctx, {brst(ctx, spec, s_af)}).zero);
}

TEST_F(ScalarTheory, NonminimalAndGaugeFixTrivial) {
    TheorySpec ext = nonminimal_extend(ctx, spec);
    EXPECT_EQ(ext.Sext, spec.Sext);
    TheorySpec fixed = gauge_fix(ctx, spec, Polynomial{});
    EXPECT_EQ(fixed.total_action(), spec.total_action());
}

} // namespace
