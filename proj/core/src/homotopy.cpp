#include "bvlab/homotopy.hpp"

#include <algorithm>

namespace bvlab {

namespace {

bool is_linear_homogeneous(const Polynomial& p) {
    for (auto& [m, c] : p.terms())
        if (m.degree() != 1) return false;
    return true;
}

} // namespace

CoordinateChange::CoordinateChange(std::vector<std::pair<VarId, Polynomial>> defs)
    : defs_(std::move(defs)) {
    std::set<VarId> olds;
    for (auto& [nv, def] : defs_) {
        if (def.is_zero() || !is_linear_homogeneous(def))
            throw UnverifiedSplit("coordinate definition is not homogeneous linear");
        for (VarId v : def.variables()) olds.insert(v);
    }
    old_coords_.assign(olds.begin(), olds.end());
    if (old_coords_.size() != defs_.size())
        throw UnverifiedSplit("coordinate change is not square (" +
                              std::to_string(defs_.size()) + " definitions over " +
                              std::to_string(old_coords_.size()) + " coordinates)");

    std::size_t n = defs_.size();
    // rows: new coordinates, cols: old coordinates
    std::vector<std::vector<Scalar>> m(n, std::vector<Scalar>(n, Scalar(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < n; ++a) {
            Monomial mono;
            mono.factors = {{old_coords_[a], 1}};
            m[i][a] = defs_[i].second.coefficient(mono);
        }
    // invert by Gauss-Jordan over the scalar field
    std::vector<std::vector<Scalar>> inv(n, std::vector<Scalar>(n, Scalar(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Scalar(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col].is_zero()) ++piv;
        if (piv == n) throw UnverifiedSplit("coordinate change is singular");
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        Scalar p = m[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            m[col][j] = m[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || m[i][col].is_zero()) continue;
            Scalar f = m[i][col];
            for (std::size_t j = 0; j < n; ++j) {
                m[i][j] -= f * m[col][j];
                inv[i][j] -= f * inv[col][j];
            }
        }
    }
    // new = M old  =>  old = M^{-1} new
    for (std::size_t a = 0; a < n; ++a) {
        Polynomial expr;
        for (std::size_t i = 0; i < n; ++i) {
            if (inv[a][i].is_zero()) continue;
            expr += Polynomial::variable(defs_[i].first) * inv[a][i];
        }
        if (!(expr == Polynomial::variable(old_coords_[a])))
            old_in_new_[old_coords_[a]] = std::move(expr);
    }
    for (auto& [nv, def] : defs_) {
        if (def == Polynomial::variable(nv)) continue; // identity coordinate
        new_in_old_[nv] = def;
        int defpar = def.parity_or_throw();
        if (defpar != nv.parity())
            throw UnverifiedSplit("new coordinate parity differs from its definition");
    }
}

Polynomial CoordinateChange::to_new(const Polynomial& p) const {
    return p.substitute(old_in_new_);
}

Polynomial CoordinateChange::from_new(const Polynomial& p) const {
    return p.substitute(new_in_old_);
}

namespace {

std::vector<std::pair<VarId, Polynomial>> build_defs(
    Context& ctx, const std::vector<std::pair<Polynomial, Polynomial>>& pairs,
    const std::vector<Polynomial>& closed, std::vector<VarId>& u, std::vector<VarId>& v,
    std::vector<VarId>& w) {
    std::vector<std::pair<VarId, Polynomial>> defs;
    auto coord_for = [&](const Polynomial& def, const char* hint) -> VarId {
        // reuse a plain variable, otherwise mint a fresh coordinate carrying
        // the (homogeneous) grading of its definition
        if (def.size() == 1) {
            auto& [m, c] = *def.terms().begin();
            if (m.degree() == 1 && c == Scalar(1)) return m.factors[0].first;
        }
        auto g = def.grading(ctx);
        if (!g) throw UnverifiedSplit("coordinate definition has mixed grading");
        return ctx.fresh_coordinate(*g, hint);
    };
    for (auto& [udef, vdef] : pairs) {
        VarId uu = coord_for(udef, "u");
        u.push_back(uu);
        defs.emplace_back(uu, udef);
        VarId vv = coord_for(vdef, "v");
        v.push_back(vv);
        defs.emplace_back(vv, vdef);
    }
    for (auto& wdef : closed) {
        VarId ww = coord_for(wdef, "w");
        w.push_back(ww);
        defs.emplace_back(ww, wdef);
    }
    return defs;
}

} // namespace

BasisSplit::BasisSplit(Context& ctx, const LinOp& D0,
                       std::vector<std::pair<Polynomial, Polynomial>> pairs,
                       std::vector<Polynomial> closed)
    : ctx_(&ctx), D0_(D0),
      change_(build_defs(ctx, pairs, closed, u_, v_, w_)), htilde_(1) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto& [udef, vdef] = pairs[i];
        if (!(D0_(udef) == vdef))
            throw UnverifiedSplit("D0 u != v for pair " + std::to_string(i));
        if (!D0_(vdef).is_zero())
            throw UnverifiedSplit("D0 v != 0 for pair " + std::to_string(i));
        if ((udef.parity_or_throw() ^ 1) != vdef.parity_or_throw())
            throw UnverifiedSplit("u and v must have opposite parity");
        htilde_.set_image(v_[i], Polynomial::variable(u_[i]));
    }
    for (std::size_t j = 0; j < closed.size(); ++j)
        if (!D0_(closed[j]).is_zero())
            throw UnverifiedSplit("D0 w != 0 for closed coordinate " + std::to_string(j));
}

int BasisSplit::counting_degree(const Monomial& m_new) const {
    int n = 0;
    for (auto& [var, e] : m_new.factors) {
        for (VarId x : u_)
            if (x == var) n += e;
        for (VarId x : v_)
            if (x == var) n += e;
    }
    return n;
}

Polynomial BasisSplit::h0(const Polynomial& p) const {
    Polynomial pn = change_.to_new(p);
    Polynomial out;
    for (auto& [m, c] : pn.terms()) {
        int n = counting_degree(m);
        if (n == 0) continue;
        Polynomial t = htilde_.apply(Polynomial::term(c, m));
        out += t * (Scalar(1) / Scalar(Rat(n)));
    }
    return change_.from_new(out);
}

LinOp BasisSplit::h0_op() const {
    const BasisSplit* self = this;
    return {1, [self](const Polynomial& p) { return self->h0(p); }};
}

std::vector<Monomial> BasisSplit::basis_monomials(int max_degree) const {
    std::vector<VarId> coords;
    coords.insert(coords.end(), u_.begin(), u_.end());
    coords.insert(coords.end(), v_.begin(), v_.end());
    coords.insert(coords.end(), w_.begin(), w_.end());
    std::sort(coords.begin(), coords.end());
    std::vector<Monomial> out;
    std::function<void(std::size_t, int, Monomial&)> rec = [&](std::size_t i, int deg,
                                                               Monomial& cur) {
        if (deg == 0 || i == coords.size()) {
            out.push_back(cur);
            return;
        }
        rec(i + 1, deg, cur);
        int emax = coords[i].odd() ? 1 : deg;
        for (int e = 1; e <= emax; ++e) {
            cur.factors.emplace_back(coords[i], e);
            rec(i + 1, deg - e, cur);
            cur.factors.pop_back();
        }
    };
    Monomial cur;
    rec(0, max_degree, cur);
    return out;
}

bool BasisSplit::verify_homotopy_identity(int max_degree) const {
    for (const Monomial& m : basis_monomials(max_degree)) {
        if (counting_degree(m) == 0) continue;
        Polynomial x = change_.from_new(Polynomial::term(Scalar(1), m));
        Polynomial lhs = D0_(h0(x)) + h0(D0_(x));
        if (!(lhs == x)) return false;
    }
    return true;
}

std::vector<Polynomial> BasisSplit::cohomology_reps(const Context& ctx, int ghost,
                                                    int max_degree) const {
    std::vector<Polynomial> reps;
    for (const Monomial& m : basis_monomials(max_degree)) {
        if (m.is_unit() || counting_degree(m) != 0) continue;
        int g = 0;
        for (auto& [var, e] : m.factors) g += ctx.grading_of(var).ghost * e;
        if (g != ghost) continue;
        reps.push_back(change_.from_new(Polynomial::term(Scalar(1), m)));
    }
    return reps;
}

std::vector<LinOp> perturbative_homotopy(const LinOp& h0, const std::vector<LinOp>& q,
                                         int order) {
    std::vector<LinOp> h(order + 1, LinOp::zero());
    h[0] = h0;
    for (int k = 1; k <= order; ++k) {
        LinOp acc = LinOp::zero();
        for (int m = 1; m <= k; ++m) {
            if (m >= static_cast<int>(q.size())) break;
            acc = add(acc, anticommutator(q[m], h[k - m]));
        }
        h[k] = scale(Scalar(-1), compose(h0, acc));
    }
    return h;
}

Polynomial homotopy_condition_residual(const std::vector<LinOp>& h, const std::vector<LinOp>& q,
                                       int k, const Polynomial& probe) {
    Polynomial acc;
    for (int m = 0; m <= k; ++m) {
        if (m >= static_cast<int>(q.size()) || k - m >= static_cast<int>(h.size())) continue;
        acc += q[m](h[k - m](probe)) + h[k - m](q[m](probe));
    }
    if (k == 0) acc -= probe;
    return acc;
}

namespace {

/// Gauss-reduces `p` against the echelon basis, returning the remainder.
Polynomial reduce_against(const std::vector<std::pair<Monomial, Polynomial>>& echelon,
                          Polynomial p) {
    bool changed = true;
    while (changed && !p.is_zero()) {
        changed = false;
        for (auto& [lead, q] : echelon) {
            Scalar c = p.coefficient(lead);
            if (c.is_zero()) continue;
            p -= q * c;
            changed = true;
        }
    }
    return p;
}

void echelon_insert(std::vector<std::pair<Monomial, Polynomial>>& echelon, Polynomial p) {
    // normalise on the leading (map-first) monomial
    auto& [lead, c] = *p.terms().begin();
    Polynomial q = p * (Scalar(1) / c);
    echelon.emplace_back(lead, q);
}

} // namespace

namespace {

/// Solves target = sum_i c_i span_i over the scalar field (dense Gauss).
std::optional<std::vector<Scalar>> solve_in_span(const std::vector<Polynomial>& span,
                                                 const Polynomial& target) {
    std::set<Monomial> monos;
    for (auto& p : span)
        for (auto& [m, c] : p.terms()) monos.insert(m);
    for (auto& [m, c] : target.terms()) monos.insert(m);
    std::vector<Monomial> rows(monos.begin(), monos.end());
    std::size_t nr = rows.size(), nc = span.size();
    std::vector<std::vector<Scalar>> a(nr, std::vector<Scalar>(nc + 1, Scalar(0)));
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t c = 0; c < nc; ++c) a[r][c] = span[c].coefficient(rows[r]);
        a[r][nc] = target.coefficient(rows[r]);
    }
    std::vector<int> pivot_col(nr, -1);
    std::size_t row = 0;
    for (std::size_t col = 0; col < nc && row < nr; ++col) {
        std::size_t piv = row;
        while (piv < nr && a[piv][col].is_zero()) ++piv;
        if (piv == nr) continue;
        std::swap(a[piv], a[row]);
        Scalar p = a[row][col];
        for (std::size_t j = 0; j <= nc; ++j) a[row][j] = a[row][j] / p;
        for (std::size_t r = 0; r < nr; ++r) {
            if (r == row || a[r][col].is_zero()) continue;
            Scalar f = a[r][col];
            for (std::size_t j = 0; j <= nc; ++j) a[r][j] -= f * a[row][j];
        }
        pivot_col[row] = static_cast<int>(col);
        ++row;
    }
    for (std::size_t r = row; r < nr; ++r)
        if (!a[r][nc].is_zero()) return std::nullopt;
    std::vector<Scalar> sol(nc, Scalar(0));
    for (std::size_t r = 0; r < row; ++r)
        if (pivot_col[r] >= 0) sol[pivot_col[r]] = a[r][nc];
    return sol;
}

} // namespace

LinearSplitData linear_split(const std::vector<VarId>& coords, const LinOp& s0) {
    LinearSplitData out;
    std::vector<std::pair<Monomial, Polynomial>> im_echelon;
    std::vector<Polynomial> kernel_pool;
    for (VarId x : coords) {
        Polynomial img = s0(Polynomial::variable(x));
        if (img.is_zero()) {
            kernel_pool.push_back(Polynomial::variable(x));
            continue;
        }
        Polynomial rem = reduce_against(im_echelon, img);
        if (rem.is_zero()) {
            kernel_pool.push_back(Polynomial::variable(x));
        } else {
            out.pairs.emplace_back(Polynomial::variable(x), img);
            echelon_insert(im_echelon, rem);
        }
    }
    // dependent-image pool entries are closed only after subtracting the
    // matching u-combination: s0(x - sum c_i u_i) = 0 with s0 x = sum c_i v_i
    std::vector<Polynomial> vs;
    for (auto& [u, v] : out.pairs) vs.push_back(v);
    std::vector<std::pair<Monomial, Polynomial>> vw_echelon = im_echelon;
    for (Polynomial cand : kernel_pool) {
        Polynomial img = s0(cand);
        if (!img.is_zero()) {
            auto sol = solve_in_span(vs, img);
            if (!sol) throw UnverifiedSplit("linear_split: image outside the span of v");
            for (std::size_t i = 0; i < sol->size(); ++i)
                if (!(*sol)[i].is_zero()) cand -= out.pairs[i].first * (*sol)[i];
        }
        Polynomial rem = reduce_against(vw_echelon, cand);
        if (rem.is_zero()) continue;
        out.closed.push_back(rem);
        echelon_insert(vw_echelon, rem);
    }
    return out;
}

HbarSeries extend_observable(const Polynomial& F0, const std::vector<LinOp>& q_layers,
                             const LinOp& s, const LinOp& h, int order) {
    if (!s(F0).is_zero())
        throw ObstructionNonClosed("extend_observable: F0 is not s-closed");
    std::vector<Polynomial> F(order + 1);
    F[0] = F0;
    HbarSeries out{F0};
    for (int k = 1; k <= order; ++k) {
        Polynomial defect;
        for (int l = 1; l <= k; ++l) {
            if (l >= static_cast<int>(q_layers.size())) break;
            defect += q_layers[l](F[k - l]);
        }
        if (!s(defect).is_zero())
            throw ObstructionNonClosed("extend_observable: order-" + std::to_string(k) +
                                       " defect is not s-closed");
        F[k] = -h(defect);
        if (!(s(F[k]) + defect).is_zero())
            throw ObstructionNonClosed("extend_observable: order-" + std::to_string(k) +
                                       " defect is not exact (nontrivial cohomology)");
        out += HbarSeries::hbar_power(F[k], k);
    }
    return out;
}

} // namespace bvlab
