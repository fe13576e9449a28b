// Pipelines shared by the consistency and contact subcommands.

namespace {

int cmd_consistency(const std::string& path, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    ModeFile mf = load_modes_path(ctx, path, text);
    Report rep = base_report("consistency", path, text);
    const ModeSystem& ms = mf.system;
    TimeOrderedFamily fam(ms);
    std::mt19937_64 rng(o.seed);
    Polynomial F = random_mode_poly(rng, ms, 3, 2, true, true);
    Polynomial S0 = ms.S0_quadratic(ctx);
    if (ms.Q) S0 += ms.S0_antifield_linear(ctx);
    Timer t;
    LinearModeDerivation D = LinearModeDerivation::from_bv_generator(ms, S0);
    auto res = consistency_residuals(ctx, ms, fam, D, S0, F, std::min(o.max_n, 4),
                                     o.hbar_order);
    for (int n = 1; n < static_cast<int>(res.size()); ++n)
        add_check(rep, "consistency-n" + std::to_string(n), res[n].is_zero(),
                  res[n].is_zero() ? "" : res[n].str(ctx), t);
    return finish(rep, o);
}

int cmd_contact(const std::string& path, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    ModeFile mf = load_modes_path(ctx, path, text);
    Report rep = base_report("contact", path, text);
    const ModeSystem& ms = mf.system;
    if (!ms.P || !ms.has_antifields()) {
        add_check(rep, "inputs", false, "contact needs P and antifields", Timer());
        return finish(rep, o);
    }
    TimeOrderedFamily fam(ms);
    Polynomial S0 = ms.S0_quadratic(ctx);
    if (ms.Q) S0 += ms.S0_antifield_linear(ctx);
    auto sfun = [&ctx, &ms, S0](const HbarSeries& X) {
        return X.map([&](const Polynomial& p) { return mode_antibracket(ctx, ms, S0, p); });
    };
    auto ab = [&ctx, &ms](const HbarSeries& X, const HbarSeries& Y) {
        HbarSeries r;
        for (int kx = X.lowest_power(); kx <= X.highest_power(); ++kx)
            for (int ky = Y.lowest_power(); ky <= Y.highest_power(); ++ky) {
                Polynomial p = mode_antibracket(ctx, ms, X.at(kx), Y.at(ky));
                if (!p.is_zero()) r += HbarSeries::hbar_power(p, kx + ky);
            }
        return r;
    };
    Timer t;
    LinearModeDerivation D = LinearModeDerivation::from_bv_generator(ms, S0);
    // q-closed ghost-zero base functional: a BRST coboundary
    std::mt19937_64 rng(o.seed);
    Polynomial G0 = random_mode_poly(rng, ms, 3, 2, false, true);
    Polynomial F = mode_antibracket(ctx, ms, S0, G0);
    {
        auto [ev, od] = F.split_parity();
        F = ev;
    }
    ComputedAnomaly anom(ctx, fam, D, F);
    BracketFamily B(sfun, ab, anom, HbarSeries{F}, o.hbar_order);

    // classical homotopy from the linear split of s0 on the momentum space
    std::vector<VarId> coords = ms.modes;
    coords.insert(coords.end(), ms.antifields.begin(), ms.antifields.end());
    LinOp s0op{1, [&ctx, &ms, S0](const Polynomial& p) {
                   return mode_antibracket(ctx, ms, S0, p);
               }};
    LinearSplitData lsd = linear_split(coords, s0op);
    BasisSplit split(ctx, s0op, lsd.pairs, lsd.closed);
    LinOp h0 = split.h0_op();
    // hbar layers of q as linear operators
    std::vector<LinOp> qlayers;
    for (int k = 0; k <= o.hbar_order; ++k) {
        qlayers.push_back(LinOp{1, [&B, k](const Polynomial& p) {
                                     return B.q(HbarSeries{p}).at(k);
                                 }});
    }
    std::vector<LinOp> h = perturbative_homotopy(h0, qlayers, o.hbar_order);
    try {
        ContactTerms C = solve_contact_terms(B, h, o.max_n);
        bool c01 = C.C[0].is_zero() && C.C[1].is_zero();
        add_check(rep, "contact-C0-C1-zero", c01, "", t);
        for (int n = 1; n <= o.max_n; ++n) {
            HbarSeries d = contact_defect(B, C, n);
            add_check(rep, "contact-defect-n" + std::to_string(n), d.is_zero(),
                      d.is_zero() ? "" : d.str(ctx), t);
        }
    } catch (const ObstructionNonClosed& e) {
        add_check(rep, "contact-solve", false, e.what(), t);
    }
    return finish(rep, o);
}

} // namespace
