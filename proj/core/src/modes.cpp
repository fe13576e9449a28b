#include "bvlab/modes.hpp"

namespace bvlab {

RatMat mat_mul(const RatMat& a, const RatMat& b) {
    std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    RatMat r(n, std::vector<Rat>(m, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
        }
    return r;
}

RatMat mat_transpose(const RatMat& a) {
    if (a.empty()) return {};
    RatMat r(a[0].size(), std::vector<Rat>(a.size(), Rat(0)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[0].size(); ++j) r[j][i] = a[i][j];
    return r;
}

RatMat mat_identity(std::size_t n) {
    RatMat r(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i) r[i][i] = 1;
    return r;
}

bool mat_equal(const RatMat& a, const RatMat& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

std::optional<RatMat> mat_inverse(const RatMat& a) {
    std::size_t n = a.size();
    RatMat m = a;
    RatMat inv = mat_identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        Rat p = m[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || m[i][col] == 0) continue;
            Rat f = m[i][col];
            for (std::size_t j = 0; j < n; ++j) {
                m[i][j] -= f * m[col][j];
                inv[i][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

int ModeSystem::index_of(VarId v) const {
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i] == v) return static_cast<int>(i);
    return -1;
}

namespace {

RatMat graded_transpose(const RatMat& a, const std::vector<int>& par) {
    RatMat r = mat_transpose(a);
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
            if (par[i] && par[j]) r[i][j] = -r[i][j];
    return r;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw CompatibilityViolation("ModeSystem: " + what);
}

} // namespace

void ModeSystem::finalize(const Context& ctx) {
    std::size_t n = modes.size();
    require(n > 0, "no modes");
    std::vector<int> par(n);
    for (std::size_t i = 0; i < n; ++i) par[i] = modes[i].parity();
    if (blocks.empty()) blocks.assign(n, 0);
    require(blocks.size() == n, "block tags must match mode count");

    auto check_square = [&](const RatMat& m, const std::string& name) {
        require(m.size() == n, name + " has wrong dimension");
        for (auto& row : m) require(row.size() == n, name + " has wrong dimension");
    };
    auto check_parity_diag = [&](const RatMat& m, const std::string& name) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (par[i] != par[j])
                    require(m[i][j] == 0, name + " couples modes of different parity");
    };
    auto check_block_diag = [&](const RatMat& m, const std::string& name) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (blocks[i] != blocks[j])
                    require(m[i][j] == 0, name + " couples disjoint sectors");
    };

    check_square(Gret, "Gret");
    check_square(W, "W");
    check_parity_diag(Gret, "Gret");
    check_parity_diag(W, "W");
    check_block_diag(Gret, "Gret");
    check_block_diag(W, "W");
    require(mat_equal(W, graded_transpose(W, par)), "W is not graded symmetric");

    Gadv = graded_transpose(Gret, par);
    RatMat delta(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) delta[i][j] = Gret[i][j] - Gadv[i][j];
    if (!Delta.empty()) {
        check_square(Delta, "Delta");
        require(mat_equal(Delta, delta), "Delta != Gret - Gadv");
    }
    Delta = delta;

    Gplus.assign(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            Gplus[i][j] = Delta[i][j] / 2 + W[i][j];
    // commutator split: G+ - graded-transpose(G+) == Delta
    {
        RatMat gt = graded_transpose(Gplus, par);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                require(Gplus[i][j] - gt[i][j] == Delta[i][j],
                        "G+ does not reproduce the commutator function");
    }
    GF.assign(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) GF[i][j] = Gplus[i][j] + Gadv[i][j];
    require(mat_equal(GF, graded_transpose(GF, par)),
            "Feynman kernel is not graded symmetric");

    if (P) {
        check_square(*P, "P");
        check_parity_diag(*P, "P");
        require(mat_equal(*P, graded_transpose(*P, par)), "P is not graded symmetric");
        require(mat_equal(mat_mul(*P, Gret), mat_identity(n)), "P Gret != id");
        require(mat_equal(mat_mul(Gret, *P), mat_identity(n)), "Gret P != id");
    }
    if (Q) {
        check_square(*Q, "Q");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (par[i] == par[j])
                    require((*Q)[i][j] == 0, "Q must couple opposite parities");
        // free-theory Ward identities: Q Gret = -(Q Gadv)^T and
        // Q Gret^T = (Q Gadv^T)^T
        RatMat lhs = mat_mul(*Q, Gret);
        RatMat rhs = mat_transpose(mat_mul(*Q, Gadv));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                require(lhs[i][j] == -rhs[i][j], "free Ward identity Q Gret = -(Q Gadv)^T fails");
        RatMat lhs2 = mat_mul(*Q, mat_transpose(Gret));
        RatMat rhs2 = mat_transpose(mat_mul(*Q, mat_transpose(Gadv)));
        require(mat_equal(lhs2, rhs2), "free Ward identity Q Gret^T = (Q Gadv^T)^T fails");
    }
    if (P && Q) {
        // equivalent statement: the antifield-linear part of S0 must leave
        // the quadratic part invariant, i.e. (S0^(1), S0^(0)) = 0
        require(has_antifields(), "Q given but no antifield partners declared");
    }
    if (has_antifields()) {
        require(antifields.size() == n, "antifield list must match mode count");
        for (std::size_t i = 0; i < n; ++i)
            require(antifields[i].parity() != modes[i].parity(),
                    "antifield partner must have opposite parity");
    }
}

Polynomial ModeSystem::S0_quadratic(const Context& ctx) const {
    (void)ctx;
    require(P.has_value(), "S0 quadratic part needs P");
    Polynomial s;
    Scalar half = Scalar::ratio(1, 2);
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = 0; j < modes.size(); ++j) {
            if ((*P)[i][j] == 0) continue;
            Polynomial t = mul(Polynomial::variable(modes[i]), Polynomial::variable(modes[j]));
            s += t * (half * Scalar((*P)[i][j]));
        }
    return s;
}

Polynomial ModeSystem::S0_antifield_linear(const Context& ctx) const {
    (void)ctx;
    require(Q.has_value() && has_antifields(), "S0^(1) needs Q and antifields");
    Polynomial s;
    for (std::size_t m = 0; m < modes.size(); ++m)
        for (std::size_t nn = 0; nn < modes.size(); ++nn) {
            if ((*Q)[m][nn] == 0) continue;
            Polynomial t = mul(Polynomial::variable(modes[nn]),
                               Polynomial::variable(antifields[m]));
            s -= t * Scalar((*Q)[m][nn]);
        }
    return s;
}

Polynomial kernel_pair(const ModeSystem& ms, const Polynomial& F, const RatMat& kernel,
                       const Polynomial& G) {
    Polynomial r;
    for (std::size_t m = 0; m < ms.modes.size(); ++m) {
        Polynomial fR = F.deriv_right(ms.modes[m]);
        if (fR.is_zero()) continue;
        for (std::size_t n = 0; n < ms.modes.size(); ++n) {
            if (kernel[m][n] == 0) continue;
            Polynomial gL = G.deriv_left(ms.modes[n]);
            if (gL.is_zero()) continue;
            r += mul(fR, gL) * Scalar(kernel[m][n]);
        }
    }
    return r;
}

Polynomial poisson(const ModeSystem& ms, const Polynomial& F, const Polynomial& G) {
    return kernel_pair(ms, F, ms.Delta, G);
}

Polynomial mode_antibracket(const Context& ctx, const ModeSystem& ms, const Polynomial& F,
                            const Polynomial& G) {
    (void)ctx;
    if (!ms.has_antifields())
        throw CompatibilityViolation("mode_antibracket: system has no antifields");
    Polynomial r;
    for (std::size_t k = 0; k < ms.modes.size(); ++k) {
        VarId phi = ms.modes[k], af = ms.antifields[k];
        r += mul(F.deriv_right(phi), G.deriv_left(af));
        r -= mul(F.deriv_right(af), G.deriv_left(phi));
    }
    return r;
}

} // namespace bvlab
