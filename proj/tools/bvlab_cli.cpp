// Command-line front end: loads theory/mode files and runs the verification
// commands, printing a human report and optionally machine-readable JSON.

#include <CLI11.hpp>

#include "bvlab/brackets.hpp"
#include "bvlab/files.hpp"
#include "bvlab/rcl.hpp"
#include "bvlab/report.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>

using namespace bvlab;

namespace {

struct CommonOpts {
    int hbar_order = 6;
    int jet_order = 3;
    int dim = 4;
    int max_n = 4;
    unsigned seed = 20190717;
    std::string json_path;
};

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void add_check(Report& rep, const std::string& id, bool pass, const std::string& detail,
               const Timer& t) {
    rep.checks.push_back({id, pass, detail, t.ms()});
}

Context make_context(const CommonOpts& o) {
    Context ctx;
    ctx.set_dim(o.dim);
    ctx.jet_order = o.jet_order;
    ctx.hbar_order = o.hbar_order;
    return ctx;
}

int finish(const Report& rep, const CommonOpts& o) {
    std::cout << rep.human();
    if (!o.json_path.empty()) {
        std::ofstream out(o.json_path, std::ios::binary);
        out << rep.json(false);
    }
    return rep.all_pass() ? 0 : 1;
}

Report base_report(const std::string& cmd, const std::string& path, const std::string& text) {
    Report rep;
    rep.command = cmd;
    rep.input = path;
    rep.digest = fnv1a_hex(text);
    return rep;
}

// deterministic random polynomials over the dynamical modes and antifields
Polynomial random_mode_poly(std::mt19937_64& rng, const ModeSystem& ms, int terms,
                            int max_deg, bool bosonic, bool with_af = true) {
    std::vector<VarId> vars = ms.modes;
    if (with_af) vars.insert(vars.end(), ms.antifields.begin(), ms.antifields.end());
    std::uniform_int_distribution<int> pick(0, static_cast<int>(vars.size()) - 1);
    std::uniform_int_distribution<int> degd(0, max_deg);
    std::uniform_int_distribution<long> coef(-4, 4);
    Polynomial p;
    for (int t = 0; t < terms; ++t) {
        Polynomial term{Scalar(Rat(coef(rng)))};
        int d = degd(rng);
        for (int j = 0; j < d; ++j) term = mul(term, Polynomial::variable(vars[pick(rng)]));
        if (term.is_zero()) continue;
        if (bosonic) {
            auto [ev, od] = term.split_parity();
            term = ev;
        }
        p += term;
    }
    if (bosonic) {
        auto [ev, od] = p.split_parity();
        return ev;
    }
    return p;
}

TheoryFile load_theory_path(Context& ctx, const std::string& path, std::string& text) {
    text = read_file(path);
    return load_theory(ctx, text);
}

ModeFile load_modes_path(Context& ctx, const std::string& path, std::string& text) {
    text = read_file(path);
    return load_modes(ctx, text);
}

int cmd_check_master(const std::string& path, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    TheoryFile tf = load_theory_path(ctx, path, text);
    Report rep = base_report("check-master", path, text);
    TheorySpec spec = tf.spec;
    if (!spec.trivial_pairs.empty()) spec = nonminimal_extend(ctx, spec);
    if (tf.gauge_fermion) spec = gauge_fix(ctx, spec, *tf.gauge_fermion);
    {
        Timer t;
        MasterReport mr = check_master_equation(ctx, spec);
        std::string det;
        if (!mr.pass) {
            for (auto& [fc, p] : mr.residual.residuals)
                det += ctx.symbol(fc.sym).name + ": " + p.str(ctx) + "; ";
            if (!mr.residual.constant_part.is_zero())
                det += "const: " + mr.residual.constant_part.str(ctx);
        }
        add_check(rep, "master-equation", mr.pass, det, t);
    }
    {
        Timer t;
        bool ok = true;
        std::string det;
        for (const FieldComponent& fc : all_components(ctx)) {
            Polynomial gen = Polynomial::variable(component_var(ctx, fc));
            Polynomial s2 = brst(ctx, spec, brst(ctx, spec, gen));
            if (!is_zero_functional(ctx, {s2}).zero) {
                ok = false;
                det = "s^2 != 0 on " + ctx.var_str(component_var(ctx, fc));
                break;
            }
        }
        add_check(rep, "brst-nilpotency", ok, det, t);
    }
    {
        Timer t;
        auto layers = antifield_layers(ctx, spec);
        bool ok = true;
        std::string det;
        for (int k = -1; k <= 1 && ok; ++k) {
            // sum_{l} s^(l) s^(k-l-1) = 0 on every generator
            for (const FieldComponent& fc : all_components(ctx)) {
                Polynomial gen = Polynomial::variable(component_var(ctx, fc));
                Polynomial acc;
                for (auto& la : layers)
                    for (auto& lb : layers) {
                        if (la.k + lb.k != k - 1) continue;
                        acc += apply_layer(ctx, la, apply_layer(ctx, lb, gen));
                    }
                if (!is_zero_functional(ctx, {acc}).zero) {
                    ok = false;
                    det = "layer identity k=" + std::to_string(k) + " fails on " +
                          ctx.var_str(component_var(ctx, fc));
                    break;
                }
            }
        }
        add_check(rep, "koszul-tate-layers", ok, det, t);
    }
    return finish(rep, o);
}

int cmd_brst_apply(const std::string& path, const std::string& expr, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    TheoryFile tf = load_theory_path(ctx, path, text);
    Report rep = base_report("brst-apply", path, text);
    TheorySpec spec = tf.spec;
    if (!spec.trivial_pairs.empty()) spec = nonminimal_extend(ctx, spec);
    if (tf.gauge_fermion) spec = gauge_fix(ctx, spec, *tf.gauge_fermion);
    Timer t;
    Polynomial F = parse_expression(expr, tf.env);
    Polynomial sF = brst(ctx, spec, F);
    std::cout << "s(" << expr << ") = " << sF.str(ctx) << "\n";
    add_check(rep, "brst-apply", true, sF.str(ctx), t);
    return finish(rep, o);
}

int cmd_layers(const std::string& path, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    TheoryFile tf = load_theory_path(ctx, path, text);
    Report rep = base_report("layers", path, text);
    TheorySpec spec = tf.spec;
    if (!spec.trivial_pairs.empty()) spec = nonminimal_extend(ctx, spec);
    if (tf.gauge_fermion) spec = gauge_fix(ctx, spec, *tf.gauge_fermion);
    Timer t;
    auto layers = antifield_layers(ctx, spec);
    std::string det;
    for (auto& l : layers) det += "s^(" + std::to_string(l.k) + ") ";
    add_check(rep, "layer-decomposition", !layers.empty(), det, t);
    for (auto& l : layers) {
        std::cout << "S_tot^(" << (l.k + 1) << ") = " << l.generator.str(ctx) << "\n";
    }
    return finish(rep, o);
}

int cmd_gauge_fix(const std::string& path, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    TheoryFile tf = load_theory_path(ctx, path, text);
    Report rep = base_report("gauge-fix", path, text);
    if (!tf.gauge_fermion) {
        add_check(rep, "gauge-fix", false, "no gauge_fermion declared", Timer());
        return finish(rep, o);
    }
    TheorySpec spec = tf.spec;
    if (!spec.trivial_pairs.empty()) spec = nonminimal_extend(ctx, spec);
    Timer t;
    TheorySpec fixed = gauge_fix(ctx, spec, *tf.gauge_fermion);
    std::cout << "S_tot (gauge fixed) = " << fixed.total_action().str(ctx) << "\n";
    MasterReport mr = check_master_equation(ctx, fixed);
    add_check(rep, "master-after-gauge-fix", mr.pass, "", t);
    return finish(rep, o);
}

LinOp s0_operator(Context& ctx, const TheorySpec& spec) {
    // free BRST differential: evolutionary field of the quadratic part of
    // the total action, including the antifield-linear terms
    Polynomial stot = spec.total_action();
    Polynomial squad;
    for (auto& [m, c] : stot.terms()) {
        int deg = 0;
        for (auto& [v, e] : m.factors) {
            Role r = ctx.symbol(ctx.info(v).sym).role;
            if (r != Role::Coupling && r != Role::Parameter) deg += e;
        }
        if (deg == 2) squad.add_term(m, c);
    }
    Context* pctx = &ctx;
    return {1, [pctx, squad](const Polynomial& p) { return antibracket(*pctx, squad, p); }};
}

int cmd_homotopy_verify(const std::string& path, const CommonOpts& o, int degree) {
    Context ctx = make_context(o);
    std::string text;
    TheoryFile tf = load_theory_path(ctx, path, text);
    Report rep = base_report("homotopy-verify", path, text);
    if (!tf.split) {
        add_check(rep, "split-present", false, "no split declared", Timer());
        return finish(rep, o);
    }
    Timer t;
    TheorySpec spec = tf.spec;
    if (!spec.trivial_pairs.empty()) spec = nonminimal_extend(ctx, spec);
    if (tf.gauge_fermion) spec = gauge_fix(ctx, spec, *tf.gauge_fermion);
    LinOp s0 = s0_operator(ctx, spec);
    try {
        BasisSplit split(ctx, s0, tf.split->pairs, tf.split->closed);
        add_check(rep, "split-verified", true, "", t);
        Timer t2;
        bool ok = split.verify_homotopy_identity(degree);
        add_check(rep, "homotopy-identity-deg" + std::to_string(degree), ok, "", t2);
    } catch (const UnverifiedSplit& e) {
        add_check(rep, "split-verified", false, e.what(), t);
    }
    return finish(rep, o);
}

int cmd_extend(const std::string& path, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    TheoryFile tf = load_theory_path(ctx, path, text);
    Report rep = base_report("extend", path, text);
    if (!tf.split || tf.observables.empty()) {
        add_check(rep, "inputs-present", false, "need split and observable", Timer());
        return finish(rep, o);
    }
    TheorySpec spec = tf.spec;
    if (!spec.trivial_pairs.empty()) spec = nonminimal_extend(ctx, spec);
    if (tf.gauge_fermion) spec = gauge_fix(ctx, spec, *tf.gauge_fermion);
    LinOp s0 = s0_operator(ctx, spec);
    Timer t;
    BasisSplit split(ctx, s0, tf.split->pairs, tf.split->closed);
    LinOp h0 = split.h0_op();
    // with vanishing corrections the extension is the classical functional
    std::vector<LinOp> q{s0};
    for (auto& [name, F0] : tf.observables) {
        try {
            HbarSeries F = extend_observable(F0, q, s0, h0, o.hbar_order);
            bool classical = F.is_classical();
            add_check(rep, "extend-" + name, classical,
                      classical ? "no quantum corrections required" : F.str(ctx), t);
        } catch (const ObstructionNonClosed& e) {
            add_check(rep, "extend-" + name, false, e.what(), t);
        }
    }
    return finish(rep, o);
}

int cmd_rcl(const std::string& path, const CommonOpts& o, int nmax) {
    Context ctx = make_context(o);
    std::string text;
    ModeFile mf = load_modes_path(ctx, path, text);
    Report rep = base_report("rcl", path, text);
    std::mt19937_64 rng(o.seed);
    const ModeSystem& ms = mf.system;
    for (int trial = 0; trial < 8; ++trial) {
        Polynomial F = random_mode_poly(rng, ms, 3, 3, true, false);
        Polynomial G = random_mode_poly(rng, ms, 3, 2, false, false);
        Polynomial H = random_mode_poly(rng, ms, 3, 2, false, false);
        Timer t;
        bool ok = true;
        std::string det;
        // linearity
        for (int n = 0; n <= nmax && ok; ++n) {
            Polynomial lhs = rcl(ms, n, F, G + H * Scalar(Rat(3)));
            Polynomial rhs = rcl(ms, n, F, G) + rcl(ms, n, F, H) * Scalar(Rat(3));
            if (!(lhs == rhs)) { ok = false; det = "linearity"; }
        }
        // factorisation
        for (int n = 0; n <= nmax && ok; ++n) {
            Polynomial lhs = rcl(ms, n, F, mul(G, H));
            Polynomial rhs;
            for (int k = 0; k <= n; ++k)
                rhs += mul(rcl(ms, k, F, G), rcl(ms, n - k, F, H)) * binomial(n, k);
            if (!(lhs == rhs)) { ok = false; det = "factorisation"; }
        }
        // field independence
        for (int n = 0; n <= nmax && ok; ++n) {
            for (std::size_t m = 0; m < ms.modes.size() && ok; ++m) {
                VarId v = ms.modes[m];
                Polynomial lhs = rcl(ms, n, F, G).deriv_left(v);
                Polynomial rhs = rcl(ms, n, F, G.deriv_left(v));
                if (n > 0)
                    rhs += rcl_insert(ctx, ms, n, F.deriv_left(v), F, G) * Scalar(Rat(n));
                if (!(lhs == rhs)) { ok = false; det = "field-independence"; }
            }
        }
        // GLZ
        for (int n = 0; n + 1 <= nmax && ok; ++n) {
            Polynomial lhs = rcl_insert(ctx, ms, n + 1, G, F, H);
            Polynomial rhs = rcl_insert(ctx, ms, n + 1, H, F, G);
            for (int k = 0; k <= n; ++k)
                rhs += poisson(ms, rcl(ms, k, F, G), rcl(ms, n - k, F, H)) * binomial(n, k);
            if (!(lhs == rhs)) { ok = false; det = "GLZ"; }
        }
        add_check(rep, "rcl-trial-" + std::to_string(trial), ok, det, t);
    }
    return finish(rep, o);
}

int cmd_glz(const std::string& path, const CommonOpts& o, int nmax) {
    return cmd_rcl(path, o, nmax);
}

int cmd_ward(const std::string& path, const CommonOpts& o, const std::string& qexpr) {
    Context ctx = make_context(o);
    std::string text;
    ModeFile mf = load_modes_path(ctx, path, text);
    Report rep = base_report("ward", path, text);
    const ModeSystem& ms = mf.system;
    TimeOrderedFamily fam(ms);
    ParseEnv env;
    env.ctx = &ctx;
    env.install_builtin_tensors();
    std::mt19937_64 rng(o.seed);
    Polynomial Q;
    if (!qexpr.empty()) Q = parse_expression(qexpr, env);
    else Q = random_mode_poly(rng, ms, 4, 2, false, false);
    Timer t;
    try {
        InnerDerivation D(ms, HbarSeries{Q});
        Polynomial F = random_mode_poly(rng, ms, 3, 3, true, false);
        auto dh = ward_extract(fam, D, HbarSeries{F}, o.max_n);
        // Theorem 3: D1 = {Q, F}, D3 = D4 = 0 classically
        auto [qe, qo] = Q.split_parity();
        bool ok1 = dh[1].classical() == poisson(ms, Q, F);
        bool ok34 = true;
        for (int n = 3; n <= o.max_n; ++n)
            if (!dh[n].classical().is_zero()) ok34 = false;
        Polynomial d2 = dh[2].classical();
        RatMat retadv = ms.Gret;
        for (std::size_t a = 0; a < ms.dim(); ++a)
            for (std::size_t b = 0; b < ms.dim(); ++b) retadv[a][b] += ms.Gadv[a][b];
        Polynomial want2;
        for (std::size_t a = 0; a < ms.dim(); ++a) {
            Polynomial fr = F.deriv_right(ms.modes[a]);
            if (fr.is_zero()) continue;
            for (std::size_t b = 0; b < ms.dim(); ++b) {
                if (retadv[a][b] == 0) continue;
                Polynomial inner = poisson(ms, Q.deriv_left(ms.modes[b]), F);
                want2 += mul(fr, inner) * Scalar(retadv[a][b]);
            }
        }
        add_check(rep, "ward-D1-poisson", ok1, "", t);
        add_check(rep, "ward-D2-formula", d2 == want2, "", t);
        add_check(rep, "ward-D3-D4-vanish", ok34, "", t);
    } catch (const NonQuadraticQ& e) {
        add_check(rep, "ward-extract", false, e.what(), t);
    }
    return finish(rep, o);
}

int cmd_free_brst_ward(const std::string& path, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    ModeFile mf = load_modes_path(ctx, path, text);
    Report rep = base_report("free-brst-ward", path, text);
    std::mt19937_64 rng(o.seed);
    Polynomial F = random_mode_poly(rng, mf.system, 3, 3, true, true);
    TimeOrderedFamily fam(mf.system);
    Timer t;
    try {
        FreeBrstReport fr = free_brst_ward(ctx, mf.system, fam, F);
        add_check(rep, "kernel-compatibility", fr.compatible, "", t);
        add_check(rep, "kt-D2-is-antibracket", fr.kt_d2_is_antibracket, fr.detail, t);
        add_check(rep, "s00-D2-vanishes", fr.s00_d2_vanishes, "", t);
    } catch (const CompatibilityViolation& e) {
        add_check(rep, "kernel-compatibility", false, e.what(), t);
    }
    return finish(rep, o);
}

int cmd_pa_check(const std::string& path, const CommonOpts& o) {
    Context ctx = make_context(o);
    std::string text;
    ModeFile mf = load_modes_path(ctx, path, text);
    Report rep = base_report("pa-check", path, text);
    std::mt19937_64 rng(o.seed);
    TimeOrderedFamily fam(mf.system);
    for (int trial = 0; trial < 4; ++trial) {
        Polynomial F = random_mode_poly(rng, mf.system, 3, 3, true);
        Timer t;
        PaReport pr = pa_check(fam, HbarSeries{F}, std::min(o.max_n, 3));
        add_check(rep, "pa-trial-" + std::to_string(trial), pr.pass, pr.detail, t);
    }
    return finish(rep, o);
}

ContactTerms run_contact(Context& ctx, const ModeSystem& ms, const TimeOrderedFamily& fam,
                         int order, int trunc, HbarSeries& Fq, BracketFamily** out_b,
                         std::vector<LinOp>& h_layers);

int cmd_linfty(const std::string& path, const CommonOpts& o, const std::string& anomaly_mode) {
    Context ctx = make_context(o);
    std::string text;
    ModeFile mf = load_modes_path(ctx, path, text);
    Report rep = base_report("linfty", path, text);
    const ModeSystem& ms = mf.system;
    TimeOrderedFamily fam(ms);
    std::mt19937_64 rng(o.seed);
    Polynomial F = random_mode_poly(rng, ms, 3, 2, true, true);

    Polynomial S0 = ms.S0_quadratic(ctx);
    if (ms.Q) S0 += ms.S0_antifield_linear(ctx);
    auto s = [&ctx, &ms, S0](const HbarSeries& X) {
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

    std::unique_ptr<AnomalySource> src;
    std::unique_ptr<ModeDerivation> D;
    if (anomaly_mode == "zero") {
        src = std::make_unique<ZeroAnomaly>();
    } else {
        D = std::make_unique<LinearModeDerivation>(
            LinearModeDerivation::from_bv_generator(ms, S0));
        src = std::make_unique<ComputedAnomaly>(ctx, fam, *D, F);
    }
    BracketFamily B(s, ab, *src, HbarSeries{F}, o.hbar_order);
    for (int n = 1; n <= std::min(o.max_n, 4); ++n) {
        Timer t;
        HbarSeries res = B.linfty_residual(n);
        add_check(rep, "linfty-n" + std::to_string(n), res.is_zero(),
                  res.is_zero() ? "" : res.str(ctx), t);
    }
    return finish(rep, o);
}

int cmd_consistency(const std::string& path, const CommonOpts& o);
int cmd_contact(const std::string& path, const CommonOpts& o);

} // namespace

// implemented in terms of library checks shared with the acceptance suite
#include "cli_checks.inl"

int main(int argc, char** argv) {
    CLI::App app{"bvlab: exact BV-BRST calculus and Ward laboratory"};
    app.require_subcommand(1);
    CommonOpts o;
    app.add_option("--hbar-order", o.hbar_order, "hbar truncation order");
    app.add_option("--jet-order", o.jet_order, "jet truncation order");
    app.add_option("--dim", o.dim, "spacetime dimension");
    app.add_option("--max-n", o.max_n, "maximal Ward/bracket order");
    app.add_option("--seed", o.seed, "random seed for property checks");
    app.add_option("--json", o.json_path, "write machine-readable report");

    std::string file, expr = "", anomaly = "computed";
    int degree = 4;

    auto* cm = app.add_subcommand("check-master", "verify the BV master equation");
    cm->add_option("file", file)->required();
    auto* ba = app.add_subcommand("brst-apply", "apply the BRST differential");
    ba->add_option("file", file)->required();
    ba->add_option("--expr", expr)->required();
    auto* ly = app.add_subcommand("layers", "antifield-number layer decomposition");
    ly->add_option("file", file)->required();
    auto* gf = app.add_subcommand("gauge-fix", "apply the gauge-fixing fermion");
    gf->add_option("file", file)->required();
    auto* hv = app.add_subcommand("homotopy-verify", "verify the declared basis split");
    hv->add_option("file", file)->required();
    hv->add_option("--degree", degree, "exhaustive monomial degree");
    auto* ex = app.add_subcommand("extend", "extend observables to hbar series");
    ex->add_option("file", file)->required();
    auto* rc = app.add_subcommand("rcl", "classical retarded product identities");
    rc->add_option("file", file)->required();
    auto* gz = app.add_subcommand("glz", "GLZ relation check");
    gz->add_option("file", file)->required();
    auto* wd = app.add_subcommand("ward", "anomalous Ward identity extraction");
    wd->add_option("file", file)->required();
    wd->add_option("--Q", expr, "quadratic charge expression");
    auto* fb = app.add_subcommand("free-brst-ward", "free BRST Ward identities");
    fb->add_option("file", file)->required();
    auto* lf = app.add_subcommand("linfty", "L-infinity relations of the quantum brackets");
    lf->add_option("file", file)->required();
    lf->add_option("--anomaly", anomaly, "zero|computed");
    auto* ct = app.add_subcommand("contact", "solve and verify contact terms");
    ct->add_option("file", file)->required();
    auto* pa = app.add_subcommand("pa-check", "perturbative agreement identities");
    pa->add_option("file", file)->required();
    auto* cs = app.add_subcommand("consistency", "Wess-Zumino consistency of the anomaly");
    cs->add_option("file", file)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cm->parsed()) return cmd_check_master(file, o);
        if (ba->parsed()) return cmd_brst_apply(file, expr, o);
        if (ly->parsed()) return cmd_layers(file, o);
        if (gf->parsed()) return cmd_gauge_fix(file, o);
        if (hv->parsed()) return cmd_homotopy_verify(file, o, degree);
        if (ex->parsed()) return cmd_extend(file, o);
        if (rc->parsed()) return cmd_rcl(file, o, 3);
        if (gz->parsed()) return cmd_glz(file, o, 3);
        if (wd->parsed()) return cmd_ward(file, o, expr);
        if (fb->parsed()) return cmd_free_brst_ward(file, o);
        if (lf->parsed()) return cmd_linfty(file, o, anomaly);
        if (ct->parsed()) return cmd_contact(file, o);
        if (pa->parsed()) return cmd_pa_check(file, o);
        if (cs->parsed()) return cmd_consistency(file, o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
