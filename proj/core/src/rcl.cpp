#include "bvlab/rcl.hpp"

namespace bvlab {

namespace {

using PolyMat = std::vector<std::vector<Polynomial>>;

PolyMat advanced_as_poly(const ModeSystem& ms) {
    std::size_t n = ms.dim();
    PolyMat r(n, std::vector<Polynomial>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (ms.Gadv[i][j] != 0) r[i][j] = Polynomial{Scalar(ms.Gadv[i][j])};
    return r;
}

Polynomial pair_through(const ModeSystem& ms, const Polynomial& F, const PolyMat& kernel,
                        const Polynomial& G) {
    Polynomial r;
    for (std::size_t m = 0; m < ms.dim(); ++m) {
        Polynomial fR = F.deriv_right(ms.modes[m]);
        if (fR.is_zero()) continue;
        for (std::size_t n = 0; n < ms.dim(); ++n) {
            if (kernel[m][n].is_zero()) continue;
            Polynomial gL = G.deriv_left(ms.modes[n]);
            if (gL.is_zero()) continue;
            r += mul(mul(fR, kernel[m][n]), gL);
        }
    }
    return r;
}

} // namespace

std::vector<std::vector<Polynomial>> rcl_kernel(const ModeSystem& ms, int k,
                                                const Polynomial& F) {
    PolyMat cur = advanced_as_poly(ms);
    if (k == 0) return cur;
    std::size_t n = ms.dim();
    PolyMat ddF(n, std::vector<Polynomial>(n));
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t l = 0; l < n; ++l)
            ddF[m][l] = F.deriv_right(ms.modes[l]).deriv_left(ms.modes[m]);
    for (int step = 1; step <= k; ++step) {
        PolyMat next(n, std::vector<Polynomial>(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                Polynomial acc;
                for (std::size_t m = 0; m < n; ++m) {
                    if (cur[a][m].is_zero()) continue;
                    for (std::size_t l = 0; l < n; ++l) {
                        if (ddF[m][l].is_zero() || ms.Gadv[l][b] == 0) continue;
                        acc += mul(cur[a][m], ddF[m][l]) * Scalar(ms.Gadv[l][b]);
                    }
                }
                next[a][b] = acc * Scalar(Rat(-step));
            }
        cur = std::move(next);
    }
    return cur;
}

Polynomial rcl(const ModeSystem& ms, int n, const Polynomial& F, const Polynomial& G) {
    if (n == 0) return G;
    // R_n = -sum_{k=0}^{n-1} C(n-1,k) R_{n-1-k}(F; <F Delta^{adv(k)} G>)
    Polynomial r;
    for (int k = 0; k <= n - 1; ++k) {
        PolyMat kern = rcl_kernel(ms, k, F);
        Polynomial inner = pair_through(ms, F, kern, G);
        if (inner.is_zero()) continue;
        Polynomial term = rcl(ms, n - 1 - k, F, inner);
        r += term * binomial(n - 1, k);
    }
    return r * Scalar(-1);
}

Polynomial rcl_insert(Context& ctx, const ModeSystem& ms, int n, const Polynomial& X,
                      const Polynomial& F, const Polynomial& G) {
    if (n == 0) return {};
    int px = X.parity().value_or(0);
    VarId a = ctx.fresh_parameter(px, "rclins");
    Polynomial Fa = F + mul(Polynomial::variable(a), X);
    Polynomial full = rcl(ms, n, Fa, G);
    Monomial pat;
    pat.factors = {{a, 1}};
    Polynomial lin = full.left_coefficient(pat);
    return lin * (Scalar(1) / Scalar(Rat(n)));
}

} // namespace bvlab
