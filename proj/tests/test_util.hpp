#pragma once

#include "bvlab/context.hpp"
#include "bvlab/polynomial.hpp"

#include <random>

namespace bvlab::testutil {

inline Polynomial random_poly(std::mt19937_64& rng, const std::vector<VarId>& vars, int terms,
                              int max_deg, int parity = -1) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(vars.size()) - 1);
    std::uniform_int_distribution<int> degd(0, max_deg);
    std::uniform_int_distribution<long> coef(-5, 5);
    Polynomial p;
    for (int t = 0; t < terms; ++t) {
        Polynomial term{Scalar(Rat(coef(rng)))};
        int d = degd(rng);
        for (int j = 0; j < d; ++j) term = mul(term, Polynomial::variable(vars[pick(rng)]));
        p += term;
    }
    if (parity >= 0) {
        auto [ev, od] = p.split_parity();
        return parity == 0 ? ev : od;
    }
    return p;
}

/// Nonzero variant (retries with growing seeds).
inline Polynomial random_poly_nonzero(std::mt19937_64& rng, const std::vector<VarId>& vars,
                                      int terms, int max_deg, int parity = -1) {
    for (int tries = 0; tries < 64; ++tries) {
        Polynomial p = random_poly(rng, vars, terms, max_deg, parity);
        if (!p.is_zero()) return p;
    }
    return Polynomial{Scalar(1)};
}

} // namespace bvlab::testutil
