#pragma once

#include "bvlab/homotopy.hpp"
#include "bvlab/ward.hpp"

namespace bvlab {

/// Evaluator for the anomaly tables entering the quantum brackets:
/// eval(args, fk) = sum_m 1/m! A_{|args|+fk+m}(args (x) F^{(x)fk} (x) L^{(x)m})
/// truncated at the configured interaction order. Sources: identically zero,
/// synthetic closures, or ward-extraction-backed tables.
class AnomalySource {
public:
    virtual ~AnomalySource() = default;
    virtual HbarSeries eval(const std::vector<HbarSeries>& args, int fk) const = 0;
};

class ZeroAnomaly : public AnomalySource {
public:
    HbarSeries eval(const std::vector<HbarSeries>&, int) const override { return {}; }
};

class SyntheticAnomaly : public AnomalySource {
public:
    using Fn = std::function<HbarSeries(const std::vector<HbarSeries>&, int)>;
    explicit SyntheticAnomaly(Fn f) : f_(std::move(f)) {}
    HbarSeries eval(const std::vector<HbarSeries>& args, int fk) const override {
        return f_(args, fk);
    }

private:
    Fn f_;
};

/// Anomaly computed from the anomalous Ward identity of a derivation on a
/// mode system, split per hbar slot so that A is O(hbar) on classical input.
class ComputedAnomaly : public AnomalySource {
public:
    ComputedAnomaly(Context& ctx, const TimeOrderedFamily& fam, const ModeDerivation& D,
                    Polynomial F, Polynomial L = {}, int l_order = 0)
        : ctx_(&ctx), fam_(&fam), D_(&D), F_(std::move(F)), L_(std::move(L)),
          l_order_(L_.is_zero() ? 0 : l_order) {}

    HbarSeries eval(const std::vector<HbarSeries>& args, int fk) const override;

    /// Raw Dhat evaluation (classical part included).
    HbarSeries dhat(const std::vector<Polynomial>& args, int fk, int m) const;

private:
    Context* ctx_;
    const TimeOrderedFamily* fam_;
    const ModeDerivation* D_;
    Polynomial F_, L_;
    int l_order_;
};

/// Quantum brackets [F1,...,Fk]_h built from the classical BRST differential,
/// the antibracket and an anomaly source, all over a fixed even functional F.
class BracketFamily {
public:
    using UnOp = std::function<HbarSeries(const HbarSeries&)>;
    using BinOp = std::function<HbarSeries(const HbarSeries&, const HbarSeries&)>;

    BracketFamily(UnOp s, BinOp antibracket, const AnomalySource& anomaly, HbarSeries F,
                  int trunc)
        : s_(std::move(s)), ab_(std::move(antibracket)), anom_(&anomaly), F_(std::move(F)),
          trunc_(trunc) {}

    /// [args (x) F^{(x)fk}]_h with parity-homogeneous args.
    HbarSeries bracket(const std::vector<HbarSeries>& args, int fk) const;

    HbarSeries diag(int l) const { return bracket({}, l); }
    HbarSeries q(const HbarSeries& X) const { return bracket({X}, 0); }
    /// quantum antibracket (X,Y)_h = (-1)^{eps_X}[X,Y]_h
    HbarSeries qab(const HbarSeries& X, const HbarSeries& Y) const;

    int truncation() const { return trunc_; }
    const HbarSeries& base() const { return F_; }

    /// L-infinity residual sum_{l=1}^{n} C(n,l) [F^{(n-l)}, [F^l]_h]_h.
    HbarSeries linfty_residual(int n) const;

private:
    UnOp s_;
    BinOp ab_;
    const AnomalySource* anom_;
    HbarSeries F_;
    int trunc_;
};

struct ContactTerms {
    std::vector<HbarSeries> C; // C[0] = C[1] = 0
};

/// Solves [exp(F - C(e^F))]_h = 0 recursively: C_n = h_hbar K_n with the
/// order-n bracket defect K_n; requires q F = 0 and q K_n = 0.
ContactTerms solve_contact_terms(const BracketFamily& B, const std::vector<LinOp>& h_hbar,
                                 int order);

/// Applies the hbar-layered homotopy to a series.
HbarSeries apply_layered(const std::vector<LinOp>& layers, const HbarSeries& X, int trunc);

/// Order-n part of [exp(F - C)]_h (zero when the contact terms solve it).
HbarSeries contact_defect(const BracketFamily& B, const ContactTerms& C, int n);

/// Wess-Zumino consistency residuals of the computed anomaly of a derivation
/// whose generator is the quadratic action `S0gen`:
///   (S0 + F, A[e^F]) - 1/2 A[(S0+F, S0+F) (x) e^F] - A[A[e^F] (x) e^F]
/// expanded order by order in F; index n = 1..max_n (entry 0 unused).
std::vector<HbarSeries> consistency_residuals(Context& ctx, const ModeSystem& ms,
                                              const TimeOrderedFamily& fam,
                                              const ModeDerivation& D,
                                              const Polynomial& S0gen, const Polynomial& F,
                                              int max_n, int trunc);

} // namespace bvlab
