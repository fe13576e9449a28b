#pragma once

#include "bvlab/derivation.hpp"
#include "bvlab/polynomial.hpp"

#include <vector>

namespace bvlab {

/// One field component: the jet family (symbol, antifield flag, indices).
struct FieldComponent {
    SymId sym = 0;
    bool antifield = false;
    std::vector<int> indices;
    friend bool operator<(const FieldComponent& a, const FieldComponent& b) {
        return std::tie(a.sym, a.antifield, a.indices) <
               std::tie(b.sym, b.antifield, b.indices);
    }
    friend bool operator==(const FieldComponent& a, const FieldComponent& b) = default;
};

/// All components (with antifield partners) of every spacetime-dependent or
/// constant-ghost symbol declared so far, in declaration order.
std::vector<FieldComponent> all_components(const Context& ctx);

/// Base (underived) variable of a component.
VarId component_var(Context& ctx, const FieldComponent& fc);

/// Total spacetime derivative of a density. The checked form enforces the
/// user-facing jet truncation; prolonged internal computations use the
/// unchecked form, which is only bounded by the hard limit.
Polynomial total_derivative_unchecked(Context& ctx, const Polynomial& den, int mu);
Polynomial total_derivative(Context& ctx, const Polynomial& den, int mu);
Polynomial total_derivative_multi(Context& ctx, const Polynomial& den,
                                  const std::vector<int>& alpha);

enum class Side { Left, Right };

/// Euler-Lagrange derivative sum_alpha (-D)^alpha d(den)/d(Phi_alpha); for
/// constant (jet-free) symbols this reduces to the plain graded derivative.
Polynomial euler_lagrange(Context& ctx, const Polynomial& den, const FieldComponent& fc,
                          Side side = Side::Right);

struct Density {
    Polynomial poly;
};

struct LocalFunctional {
    Polynomial density;
};

struct ZeroCheck {
    bool zero = true;
    Polynomial constant_part; // jet-free terms of the density
    std::vector<std::pair<FieldComponent, Polynomial>> residuals;
};

/// A translation-invariant polynomial density integrates to the zero
/// functional iff all its Euler-Lagrange derivatives vanish and its
/// jet-free part is zero (algebraic Poincare lemma).
ZeroCheck is_zero_functional(Context& ctx, const LocalFunctional& f);
bool functionals_equal(Context& ctx, const LocalFunctional& a, const LocalFunctional& b);

/// Prolongation of a map "component -> density" to a graded derivation on
/// the jet algebra: the image of Phi_{K,alpha} is D_alpha applied to the
/// image of Phi_K, for every jet variable present in `support`.
GradedDerivation prolong(Context& ctx, int parity,
                         const std::map<FieldComponent, Polynomial>& images,
                         const Polynomial& support);

} // namespace bvlab
