#pragma once

#include "bvlab/modes.hpp"

namespace bvlab {

/// Classical retarded products R^cl_n(F^{(x)n}; G) from the advanced-kernel
/// recursion; all arguments are classical polynomials over the mode system
/// and F is assumed bosonic.
Polynomial rcl(const ModeSystem& ms, int n, const Polynomial& F, const Polynomial& G);

/// Field-dependent advanced kernels Delta^{adv(k)} entering the recursion.
std::vector<std::vector<Polynomial>> rcl_kernel(const ModeSystem& ms, int k,
                                                const Polynomial& F);

/// R^cl_n(X (x) F^{(x)(n-1)}; G) by polarisation with a fresh parameter.
Polynomial rcl_insert(Context& ctx, const ModeSystem& ms, int n, const Polynomial& X,
                      const Polynomial& F, const Polynomial& G);

} // namespace bvlab
