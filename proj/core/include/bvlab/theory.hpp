#pragma once

#include "bvlab/jets.hpp"

#include <optional>

namespace bvlab {

/// A field theory in antifield form: field content lives in the Context,
/// the action pieces are translation-invariant densities.
struct TheorySpec {
    std::string name;
    std::vector<SymId> fields;      // all Phi_K symbol families
    Polynomial S0;                  // free part, quadratic
    Polynomial Sint;                // interaction, at least cubic
    Polynomial Sext;                // antifield extension
    std::map<FieldComponent, Polynomial> delta_c; // ghost-parameter symmetry on original fields
    std::map<FieldComponent, Polynomial> Kmap;    // structure functions K_M per ghost component
    std::vector<std::pair<SymId, SymId>> trivial_pairs; // (antighost, auxiliary)
    std::optional<Polynomial> gauge_fermion;
    std::vector<SymId> couplings;

    Polynomial total_action() const { return S0 + Sint + Sext; }
};

/// Antibracket of local functionals, computed as the evolutionary vector
/// field of F acting on the density of G (valid modulo total divergences).
Polynomial antibracket(Context& ctx, const Polynomial& F, const Polynomial& G);

/// s F = (S_tot, F)
Polynomial brst(Context& ctx, const TheorySpec& spec, const Polynomial& F);

struct MasterReport {
    bool pass = false;
    ZeroCheck residual;
};
MasterReport check_master_equation(Context& ctx, const TheorySpec& spec);

struct BrstLayer {
    int k;                 // antifield-number offset of s^{(k)}
    Polynomial generator;  // S_tot^{(k+1)}
};
std::vector<BrstLayer> antifield_layers(Context& ctx, const TheorySpec& spec);
Polynomial apply_layer(Context& ctx, const BrstLayer& layer, const Polynomial& F);

/// Adds the trivial-pair term -B_M cbar^sharp_M for every declared pair.
TheorySpec nonminimal_extend(Context& ctx, const TheorySpec& spec);

/// Canonical transformation generated by an antifield-independent gauge
/// fixing fermion Psi (ghost number -1, odd): substitutes
/// Phi^sharp -> Phi^sharp - dR Psi / dPhi in the total action.
TheorySpec gauge_fix(Context& ctx, const TheorySpec& spec, const Polynomial& psi);

/// Left-hand side of the closure condition
/// (delta_c + int K_M dL/dc_M) delta_c phi_N per original field component.
std::map<FieldComponent, Polynomial> verify_k_condition(
    Context& ctx, const TheorySpec& spec, const std::map<FieldComponent, Polynomial>& K);

/// Minimal antifield extension - int [delta_c phi_M] phi^sharp_M
///                              - int K_M c^sharp_M.
Polynomial minimal_extension(Context& ctx, const TheorySpec& spec);

} // namespace bvlab
