#pragma once

#include "bvlab/derivation.hpp"

namespace bvlab {

class UnverifiedSplit : public std::runtime_error {
public:
    explicit UnverifiedSplit(const std::string& m) : std::runtime_error(m) {}
};

class ObstructionNonClosed : public std::runtime_error {
public:
    explicit ObstructionNonClosed(const std::string& m) : std::runtime_error(m) {}
};

/// Invertible linear change of graded coordinates: each new coordinate is a
/// fresh variable defined by a linear polynomial in the old ones. Used to
/// express contractible-pair bases whose v (and w) coordinates are linear
/// combinations of jet variables.
class CoordinateChange {
public:
    /// `defs` maps every new coordinate to its linear definition; the old
    /// coordinates are the union of the variables appearing in the
    /// definitions, and the defining matrix must be square and invertible.
    explicit CoordinateChange(std::vector<std::pair<VarId, Polynomial>> defs);

    const std::vector<VarId>& old_coords() const { return old_coords_; }
    Polynomial to_new(const Polynomial& p) const;   // rewrite in new coordinates
    Polynomial from_new(const Polynomial& p) const; // expand definitions

private:
    std::vector<std::pair<VarId, Polynomial>> defs_;
    std::vector<VarId> old_coords_;
    std::map<VarId, Polynomial> old_in_new_;
    std::map<VarId, Polynomial> new_in_old_;
};

/// Contractible-pair splitting {u_i, v_i} u {w_j} of a coordinate patch for
/// a differential D0: D0 u_i = v_i, D0 v_i = 0, D0 w_j = 0, all verified at
/// construction. v_i and w_j may be linear combinations of the original
/// coordinates; fresh coordinates are introduced internally.
class BasisSplit {
public:
    BasisSplit(Context& ctx, const LinOp& D0,
               std::vector<std::pair<Polynomial, Polynomial>> pairs,
               std::vector<Polynomial> closed);

    /// Counting operator eigenvalue of a monomial in new coordinates.
    int counting_degree(const Monomial& m_new) const;

    /// h0 = htilde0 / N_{u,v} on positive counting degree, 0 on degree zero.
    Polynomial h0(const Polynomial& p) const;

    /// Exhaustively verifies D0 h0 + h0 D0 = id on all monomials of the
    /// given maximal degree with positive counting number.
    bool verify_homotopy_identity(int max_degree) const;

    /// Monomials in the closed coordinates only, at the requested ghost
    /// number and maximal degree, expressed in the original coordinates.
    std::vector<Polynomial> cohomology_reps(const Context& ctx, int ghost,
                                            int max_degree) const;

    const CoordinateChange& coords() const { return change_; }
    LinOp h0_op() const;
    const LinOp& differential() const { return D0_; }

private:
    std::vector<Monomial> basis_monomials(int max_degree) const;
    Context* ctx_;
    LinOp D0_;
    CoordinateChange change_;
    std::vector<VarId> u_, v_, w_;
    GradedDerivation htilde_;
};

/// Perturbative homotopy h^(k) = -h0 sum_m [q^(m) h^(k-m) + h^(k-m) q^(m)]
/// for corrections q[1..K]; returns h[0..K].
std::vector<LinOp> perturbative_homotopy(const LinOp& h0, const std::vector<LinOp>& q,
                                         int order);

/// Order-k homotopy condition sum_m (q^(m) h^(k-m) + h^(k-m) q^(m)) = id|_{k=0}
/// evaluated on a probe polynomial; returns the residual.
Polynomial homotopy_condition_residual(const std::vector<LinOp>& h, const std::vector<LinOp>& q,
                                       int k, const Polynomial& probe);

/// Extends an s-closed functional to a q-closed hbar series:
/// F^(k) = -h( sum_{l=1..k} q^(l) F^(k-l) ); the defect must be s-closed.
HbarSeries extend_observable(const Polynomial& F0, const std::vector<LinOp>& q_layers,
                             const LinOp& s, const LinOp& h, int order);

/// Contractible-pair data for a nilpotent differential acting linearly on a
/// finite coordinate list (mode systems): u = coordinates with independent
/// images, v = their images, w = a kernel complement. Returns inputs for
/// BasisSplit; the split is still verified on construction.
struct LinearSplitData {
    std::vector<std::pair<Polynomial, Polynomial>> pairs;
    std::vector<Polynomial> closed;
};
LinearSplitData linear_split(const std::vector<VarId>& coords, const LinOp& s0);

} // namespace bvlab
