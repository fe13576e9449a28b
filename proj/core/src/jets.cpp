#include "bvlab/jets.hpp"

namespace bvlab {

namespace {

bool jetlike(const SymbolInfo& s) {
    switch (s.role) {
        case Role::Field:
        case Role::Ghost:
        case Role::Antighost:
        case Role::Auxiliary:
        case Role::ConstantGhost:
        case Role::Mode:
            return true;
        default:
            return false;
    }
}

void enumerate_indices(const std::vector<int>& ranges, std::vector<int>& cur,
                       std::vector<std::vector<int>>& out) {
    if (cur.size() == ranges.size()) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k < ranges[cur.size()]; ++k) {
        cur.push_back(k);
        enumerate_indices(ranges, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<FieldComponent> all_components(const Context& ctx) {
    std::vector<FieldComponent> out;
    for (SymId s = 0; s < ctx.symbol_count(); ++s) {
        const SymbolInfo& sym = ctx.symbol(s);
        if (!jetlike(sym)) continue;
        std::vector<std::vector<int>> idx;
        std::vector<int> cur;
        enumerate_indices(sym.index_ranges, cur, idx);
        for (auto& iv : idx) {
            out.push_back({s, false, iv});
            if (sym.has_antifield) out.push_back({s, true, iv});
        }
    }
    return out;
}

VarId component_var(Context& ctx, const FieldComponent& fc) {
    return ctx.var(fc.sym, fc.antifield, fc.indices, {});
}

Polynomial total_derivative_unchecked(Context& ctx, const Polynomial& den, int mu) {
    Polynomial r;
    for (VarId v : den.variables()) {
        if (!ctx.spacetime_dependent(v)) continue;
        Polynomial dv = den.deriv_left(v);
        if (dv.is_zero()) continue;
        r += mul(Polynomial::variable(ctx.shift_deriv(v, mu)), dv);
    }
    return r;
}

Polynomial total_derivative(Context& ctx, const Polynomial& den, int mu) {
    Polynomial r = total_derivative_unchecked(ctx, den, mu);
    for (VarId v : r.variables())
        if (static_cast<int>(ctx.info(v).derivs.size()) > ctx.jet_order)
            throw JetOverflow("total_derivative: jet truncation " +
                              std::to_string(ctx.jet_order) + " exceeded");
    return r;
}

Polynomial total_derivative_multi(Context& ctx, const Polynomial& den,
                                  const std::vector<int>& alpha) {
    Polynomial r = den;
    for (int mu : alpha) r = total_derivative_unchecked(ctx, r, mu);
    return r;
}

Polynomial euler_lagrange(Context& ctx, const Polynomial& den, const FieldComponent& fc,
                          Side side) {
    Polynomial r;
    for (VarId v : den.variables()) {
        // copy: interning during prolongation invalidates registry references
        const VarInfo in = ctx.info(v);
        if (in.sym != fc.sym || in.antifield != fc.antifield || in.indices != fc.indices)
            continue;
        Polynomial d = (side == Side::Left) ? den.deriv_left(v) : den.deriv_right(v);
        if (d.is_zero()) continue;
        d = total_derivative_multi(ctx, d, in.derivs);
        if (in.derivs.size() % 2 == 1) d = d * Scalar(-1);
        r += d;
    }
    return r;
}

ZeroCheck is_zero_functional(Context& ctx, const LocalFunctional& f) {
    ZeroCheck out;
    for (auto& [m, c] : f.density.terms()) {
        bool has_jet = false;
        for (auto& [v, e] : m.factors) {
            const SymbolInfo& sym = ctx.symbol(ctx.info(v).sym);
            if (jetlike(sym)) { has_jet = true; break; }
        }
        if (!has_jet) out.constant_part.add_term(m, c);
    }
    if (!out.constant_part.is_zero()) out.zero = false;
    for (const FieldComponent& fc : all_components(ctx)) {
        Polynomial el = euler_lagrange(ctx, f.density, fc, Side::Left);
        if (!el.is_zero()) {
            out.zero = false;
            out.residuals.emplace_back(fc, std::move(el));
        }
    }
    return out;
}

bool functionals_equal(Context& ctx, const LocalFunctional& a, const LocalFunctional& b) {
    return is_zero_functional(ctx, {a.density - b.density}).zero;
}

GradedDerivation prolong(Context& ctx, int parity,
                         const std::map<FieldComponent, Polynomial>& images,
                         const Polynomial& support) {
    GradedDerivation d(parity);
    for (VarId v : support.variables()) {
        const VarInfo in = ctx.info(v); // copy, interning invalidates references
        auto it = images.find({in.sym, in.antifield, in.indices});
        if (it == images.end()) continue;
        d.set_image(v, total_derivative_multi(ctx, it->second, in.derivs));
    }
    return d;
}

} // namespace bvlab
