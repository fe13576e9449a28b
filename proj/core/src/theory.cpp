#include "bvlab/theory.hpp"

namespace bvlab {

namespace {

/// Evolutionary vector field of F: the Phi-image is -EL_R(F)/dPhi^sharp and
/// the Phi^sharp-image is +EL_R(F)/dPhi, prolonged over the jets of the
/// target polynomial.
GradedDerivation hamiltonian_field(Context& ctx, const Polynomial& F, int parity_F,
                                   const Polynomial& target) {
    std::map<FieldComponent, Polynomial> images;
    for (VarId v : target.variables()) {
        const VarInfo in = ctx.info(v); // copy, interning invalidates references
        const SymbolInfo sym = ctx.symbol(in.sym);
        if (sym.role == Role::Coupling || sym.role == Role::Parameter) continue;
        FieldComponent fc{in.sym, in.antifield, in.indices};
        if (images.count(fc)) continue;
        if (!sym.has_antifield) continue; // no conjugate partner, no flow
        FieldComponent conj{in.sym, !in.antifield, in.indices};
        Polynomial el = euler_lagrange(ctx, F, conj, Side::Right);
        if (in.antifield) {
            images[fc] = std::move(el); // coefficient of d/dPhi^sharp
        } else {
            images[fc] = el * Scalar(-1); // coefficient of d/dPhi
        }
    }
    return prolong(ctx, (parity_F + 1) & 1, images, target);
}

} // namespace

Polynomial antibracket(Context& ctx, const Polynomial& F, const Polynomial& G) {
    auto pf = F.parity();
    auto pg = G.parity();
    if (!pf || !pg)
        throw MixedGrading("antibracket: mixed-parity input rejected");
    return hamiltonian_field(ctx, F, *pf, G).apply(G);
}

Polynomial brst(Context& ctx, const TheorySpec& spec, const Polynomial& F) {
    return antibracket(ctx, spec.total_action(), F);
}

MasterReport check_master_equation(Context& ctx, const TheorySpec& spec) {
    Polynomial s = spec.total_action();
    MasterReport rep;
    rep.residual = is_zero_functional(ctx, {antibracket(ctx, s, s)});
    rep.pass = rep.residual.zero;
    return rep;
}

std::vector<BrstLayer> antifield_layers(Context& ctx, const TheorySpec& spec) {
    Polynomial s = spec.total_action();
    int amax = s.max_antifield_number(ctx);
    std::vector<BrstLayer> layers;
    for (int a = 0; a <= amax; ++a) {
        Polynomial part = s.antifield_part(ctx, a);
        if (part.is_zero() && a > 0) continue;
        layers.push_back({a - 1, std::move(part)});
    }
    return layers;
}

Polynomial apply_layer(Context& ctx, const BrstLayer& layer, const Polynomial& F) {
    if (layer.generator.is_zero()) return {};
    return antibracket(ctx, layer.generator, F);
}

TheorySpec nonminimal_extend(Context& ctx, const TheorySpec& spec) {
    TheorySpec out = spec;
    for (auto& [antighost, aux] : spec.trivial_pairs) {
        const SymbolInfo& ag = ctx.symbol(antighost);
        std::vector<std::vector<int>> idx{{}};
        for (std::size_t level = 0; level < ag.index_ranges.size(); ++level) {
            std::vector<std::vector<int>> next;
            for (auto& iv : idx)
                for (int k = 0; k < ag.index_ranges[level]; ++k) {
                    auto w = iv;
                    w.push_back(k);
                    next.push_back(std::move(w));
                }
            idx = std::move(next);
        }
        for (auto& iv : idx) {
            Polynomial b = Polynomial::variable(ctx.var(aux, false, iv, {}));
            Polynomial agaf = Polynomial::variable(ctx.var(antighost, true, iv, {}));
            out.Sext -= mul(b, agaf);
        }
    }
    return out;
}

TheorySpec gauge_fix(Context& ctx, const TheorySpec& spec, const Polynomial& psi) {
    if (psi.is_zero()) return spec;
    auto g = psi.grading(ctx);
    if (!g || g->parity != 1 || g->ghost != -1)
        throw MixedGrading("gauge_fix: Psi must be odd with ghost number -1");
    for (VarId v : psi.variables())
        if (ctx.is_antifield_var(v))
            throw std::invalid_argument("gauge_fix: Psi must not depend on antifields");

    Polynomial stot = spec.total_action();
    std::map<VarId, Polynomial> subst;
    for (VarId v : stot.variables()) {
        const VarInfo in = ctx.info(v); // copy, interning invalidates references
        if (!in.antifield) continue;
        FieldComponent plain{in.sym, false, in.indices};
        Polynomial el = euler_lagrange(ctx, psi, plain, Side::Right);
        if (el.is_zero()) continue;
        Polynomial image = Polynomial::variable(v) -
                           total_derivative_multi(ctx, el, in.derivs);
        subst[v] = std::move(image);
    }
    TheorySpec out = spec;
    out.S0 = spec.S0.substitute(subst);
    out.Sint = spec.Sint.substitute(subst);
    out.Sext = spec.Sext.substitute(subst);
    out.gauge_fermion = psi;
    return out;
}

std::map<FieldComponent, Polynomial> verify_k_condition(
    Context& ctx, const TheorySpec& spec, const std::map<FieldComponent, Polynomial>& K) {
    // derivation: delta_c on original fields plus c_M -> K_M on ghosts
    std::map<FieldComponent, Polynomial> images = spec.delta_c;
    for (auto& [fc, k] : K) images[fc] = k;
    std::map<FieldComponent, Polynomial> residuals;
    for (auto& [fc, dphi] : spec.delta_c) {
        GradedDerivation d = prolong(ctx, 1, images, dphi);
        Polynomial res = d.apply(dphi);
        if (!res.is_zero()) residuals[fc] = std::move(res);
    }
    return residuals;
}

Polynomial minimal_extension(Context& ctx, const TheorySpec& spec) {
    Polynomial ext;
    for (auto& [fc, dphi] : spec.delta_c) {
        Polynomial af = Polynomial::variable(ctx.var(fc.sym, true, fc.indices, {}));
        ext -= mul(dphi, af);
    }
    for (auto& [fc, k] : spec.Kmap) {
        Polynomial af = Polynomial::variable(ctx.var(fc.sym, true, fc.indices, {}));
        ext -= mul(k, af);
    }
    return ext;
}

} // namespace bvlab
