#pragma once

#include "bvlab/polynomial.hpp"

#include <optional>
#include <vector>

namespace bvlab {

class CompatibilityViolation : public std::runtime_error {
public:
    explicit CompatibilityViolation(const std::string& m) : std::runtime_error(m) {}
};

using RatMat = std::vector<std::vector<Rat>>;

RatMat mat_mul(const RatMat& a, const RatMat& b);
RatMat mat_transpose(const RatMat& a);
RatMat mat_identity(std::size_t n);
bool mat_equal(const RatMat& a, const RatMat& b);
std::optional<RatMat> mat_inverse(const RatMat& a);

/// Finite-dimensional surrogate of a free field theory: finitely many graded
/// modes with exact rational propagator kernels. Antifield partners are
/// non-dynamical: they never contract and drop out of all kernels.
struct ModeSystem {
    std::vector<VarId> modes;       // dynamical modes, kernel index order
    std::vector<VarId> antifields;  // optional partners, same order ({} if none)
    std::vector<int> blocks;        // locality tag per mode (coupled sector id)

    RatMat Gret, Gadv, Delta, W, Gplus, GF;
    std::optional<RatMat> P; // quadratic form of S0^(0)
    std::optional<RatMat> Q; // differential of S0^(1): s Phi_K = Q_KN Phi_N

    std::size_t dim() const { return modes.size(); }
    int index_of(VarId v) const;
    bool has_antifields() const { return !antifields.empty(); }

    /// Derives Gadv, Delta (if absent), Gplus, GF and checks every invariant;
    /// throws CompatibilityViolation on failure.
    void finalize(const Context& ctx);

    Polynomial S0_quadratic(const Context& ctx) const;  // 1/2 Phi P Phi
    Polynomial S0_antifield_linear(const Context& ctx) const; // -(Q Phi) Phi^sharp
};

/// Kernel pairing sum_{MN} (dR F/dPhi_M) K_{MN} (dL G/dPhi_N) over the
/// dynamical modes, with the factors multiplied in written order.
Polynomial kernel_pair(const ModeSystem& ms, const Polynomial& F, const RatMat& kernel,
                       const Polynomial& G);

/// Classical Poisson bracket {F, G} with the Pauli-Jordan kernel.
Polynomial poisson(const ModeSystem& ms, const Polynomial& F, const Polynomial& G);

/// Mode-level antibracket (no jets): fields paired with their antifields.
Polynomial mode_antibracket(const Context& ctx, const ModeSystem& ms, const Polynomial& F,
                            const Polynomial& G);

} // namespace bvlab
