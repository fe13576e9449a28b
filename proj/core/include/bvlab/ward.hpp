#pragma once

#include "bvlab/wick.hpp"

namespace bvlab {

class NonQuadraticQ : public std::runtime_error {
public:
    explicit NonQuadraticQ(const std::string& m) : std::runtime_error(m) {}
};

/// Graded derivation on the free-mode algebra, acting on normal symbols.
class ModeDerivation {
public:
    virtual ~ModeDerivation() = default;
    virtual int parity() const = 0;
    virtual HbarSeries apply(const HbarSeries& s) const = 0;
};

/// Inner derivation (i hbar)^{-1} [Q, .]_star with :Q: at most quadratic in
/// the dynamical modes (arbitrary antifield dependence).
class InnerDerivation : public ModeDerivation {
public:
    InnerDerivation(const ModeSystem& ms, HbarSeries Q, int trunc = HbarSeries::kExact);
    int parity() const override { return parity_; }
    HbarSeries apply(const HbarSeries& s) const override;

private:
    const ModeSystem* ms_;
    HbarSeries q_;
    int parity_;
    int trunc_;
};

/// Derivation defined by a linear action on the generators and extended to
/// the whole algebra by the graded Leibniz rule with respect to the star
/// product. Consistency with the commutation relations requires the
/// Pauli-Jordan kernel to be invariant, which is checked on construction.
class LinearModeDerivation : public ModeDerivation {
public:
    LinearModeDerivation(const ModeSystem& ms, std::map<VarId, Polynomial> images,
                         int parity, int trunc = HbarSeries::kExact);

    /// Derivation (Q, .) of Theorem-5 type from a quadratic generator:
    /// D Phi_K = -dR q / dPhi^sharp_K, D Phi^sharp_K = +dR q / dPhi_K.
    static LinearModeDerivation from_bv_generator(const ModeSystem& ms, const Polynomial& q,
                                                  int trunc = HbarSeries::kExact);

    int parity() const override { return parity_; }
    HbarSeries apply(const HbarSeries& s) const override;
    const std::map<VarId, Polynomial>& images() const { return images_; }

private:
    HbarSeries apply_mono(const Monomial& m) const;
    const ModeSystem* ms_;
    std::map<VarId, Polynomial> images_;
    int parity_;
    int trunc_;
    mutable std::map<Monomial, HbarSeries> cache_;
};

/// Invariance defect of the commutator kernel under the generator map;
/// must vanish for the star-Leibniz extension to be well defined.
Polynomial delta_invariance_defect(const ModeSystem& ms,
                                   const std::map<VarId, Polynomial>& images, int parity,
                                   VarId a, VarId b);

/// Recursive extraction of the anomalous Ward identity:
/// returns Dhat_n(F^{(x)n}) for n = 1..max_n (index 0 unused).
std::vector<HbarSeries> ward_extract(const TimeOrderedFamily& fam, const ModeDerivation& D,
                                     const HbarSeries& F, int max_n);

/// Reassembles D T_n(F^{(x)n}) from extracted tables (consistency probe).
HbarSeries ward_reassemble(const TimeOrderedFamily& fam,
                           const std::vector<HbarSeries>& dhat, const HbarSeries& F, int n);

/// Dhat_{k+m+|args|}(args (x) L^{(x)m} (x) F^{(x)k}) by polarisation with
/// fresh parameters; args must be parity homogeneous.
HbarSeries dhat_multi(Context& ctx, const TimeOrderedFamily& fam, const ModeDerivation& D,
                      const std::vector<HbarSeries>& args, const Polynomial& F, int k,
                      const Polynomial& L, int m);

/// hbar-linear classical/anomaly split of a slot-linear evaluator: applies
/// `eval` to each hbar coefficient of X and keeps only the genuinely quantum
/// part (eval(X_j) minus its classical limit, shifted back).
HbarSeries anomaly_part(const HbarSeries& X,
                        const std::function<HbarSeries(const Polynomial&)>& eval);

/// Perturbative-agreement identities for linear field arguments.
struct PaReport {
    bool pass = true;
    std::string detail;
};
PaReport pa_check(const TimeOrderedFamily& fam, const HbarSeries& F, int max_n);

/// Theorem-6 style checks on a mode system carrying P and Q matrices.
struct FreeBrstReport {
    bool compatible = false;       // kernel invariance of all layers
    bool kt_d2_is_antibracket = false;
    bool s00_d2_vanishes = false;
    bool s01_d2_vanishes = true;   // vacuous when S0^(2) = 0
    std::string detail;
};
FreeBrstReport free_brst_ward(Context& ctx, const ModeSystem& ms,
                              const TimeOrderedFamily& fam, const Polynomial& F,
                              const Polynomial& S02 = {});

} // namespace bvlab
