#pragma once

#include "bvlab/modes.hpp"
#include "bvlab/series.hpp"

#include <functional>
#include <memory>

namespace bvlab {

/// Bidifferential Wick product of normal symbols,
///   A exp(i hbar <dR, kernel, dL>) B,
/// summing contractions over the dynamical modes only.
HbarSeries wick_pair(const ModeSystem& ms, const HbarSeries& A, const HbarSeries& B,
                     const RatMat& kernel, int trunc);

/// Normal-ordered star product (kernel G+).
HbarSeries star(const ModeSystem& ms, const HbarSeries& A, const HbarSeries& B,
                int trunc = HbarSeries::kExact);

/// Graded commutator [A, B]_star.
HbarSeries star_commutator(const ModeSystem& ms, const HbarSeries& A, const HbarSeries& B,
                           int trunc = HbarSeries::kExact);

/// star power series helpers
HbarSeries star_power(const ModeSystem& ms, const HbarSeries& A, int n, int trunc);

/// Multilinear time-ordered products; the base family is the Wick product
/// with the graded-symmetric Feynman kernel GF = G+ + Gadv, for which
/// T1 = normal ordering and T1^{-1} is the identity on symbols.
class TimeOrderedFamily {
public:
    explicit TimeOrderedFamily(const ModeSystem& ms, int trunc = HbarSeries::kExact)
        : ms_(&ms), trunc_(trunc) {}
    virtual ~TimeOrderedFamily() = default;

    const ModeSystem& modes() const { return *ms_; }
    int truncation() const { return trunc_; }

    virtual HbarSeries T(const std::vector<HbarSeries>& factors) const;
    virtual HbarSeries T1_inverse(const HbarSeries& s) const { return s; }

protected:
    const ModeSystem* ms_;
    int trunc_;
};

/// Family obtained from a base family by the renormalisation freedom
/// T^[exp(iF/hbar)] = T[exp(i(F + Z(e^F))/hbar)], with Z supplied as a
/// multilinear evaluator (graded symmetric, O(hbar), Z_0 = 0).
class RedefinedFamily : public TimeOrderedFamily {
public:
    using Zmap = std::function<HbarSeries(const std::vector<HbarSeries>&)>;
    RedefinedFamily(const TimeOrderedFamily& base, Zmap z)
        : TimeOrderedFamily(base.modes(), base.truncation()), base_(&base), z_(std::move(z)) {}

    HbarSeries T(const std::vector<HbarSeries>& factors) const override;
    HbarSeries T1_inverse(const HbarSeries& s) const override;

private:
    const TimeOrderedFamily* base_;
    Zmap z_;
};

/// Connected time-ordered products T^c_n over ordered set partitions.
HbarSeries connected(const TimeOrderedFamily& fam, const std::vector<HbarSeries>& factors);

/// star-inverse coefficients of T[exp(i/hbar L)]:
/// Vbar_n with sum_{a+b=n} Vbar_a * V_b = delta_{n0}, V_k = (i/hbar)^k/k! T_k(L^k).
std::vector<HbarSeries> texp_inverse(const TimeOrderedFamily& fam, const HbarSeries& L,
                                     int order);

/// Interacting time-ordered products at the given order in the interaction:
/// T_{L,m}(G^{(x)m}) restricted to L-order n.
HbarSeries interacting(const TimeOrderedFamily& fam, const HbarSeries& L, int n,
                       const std::vector<HbarSeries>& G);

/// Quantum retarded product R_n(L^{(x)n}; G).
HbarSeries retarded(const TimeOrderedFamily& fam, const HbarSeries& L, int n,
                    const HbarSeries& G);

} // namespace bvlab
