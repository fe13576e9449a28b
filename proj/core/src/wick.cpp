#include "bvlab/wick.hpp"

#include <algorithm>

namespace bvlab {

namespace {

struct MonoDeriv {
    Monomial reduced;
    int coeff = 0; // signed integer factor (exponent times Koszul sign)
};

bool deriv_right_mono(const Monomial& m, VarId v, MonoDeriv& out) {
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
        auto [w, e] = m.factors[i];
        if (!(w == v)) continue;
        int suffix_odd = 0;
        for (std::size_t j = i + 1; j < m.factors.size(); ++j)
            if (m.factors[j].first.odd()) suffix_odd ^= (m.factors[j].second & 1);
        out.reduced = m;
        if (e == 1) out.reduced.factors.erase(out.reduced.factors.begin() + i);
        else out.reduced.factors[i].second = e - 1;
        out.coeff = e;
        if (v.odd() && (suffix_odd & 1)) out.coeff = -out.coeff;
        return true;
    }
    return false;
}

bool deriv_left_mono(const Monomial& m, VarId v, MonoDeriv& out) {
    int prefix_odd = 0;
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
        auto [w, e] = m.factors[i];
        if (w == v) {
            out.reduced = m;
            if (e == 1) out.reduced.factors.erase(out.reduced.factors.begin() + i);
            else out.reduced.factors[i].second = e - 1;
            out.coeff = e;
            if (v.odd() && (prefix_odd & 1)) out.coeff = -out.coeff;
            return true;
        }
        if (w.odd()) prefix_odd ^= (e & 1);
    }
    return false;
}

using BiPoly = std::map<std::pair<Monomial, Monomial>, Scalar>;

void bipoly_add(BiPoly& bp, const Monomial& a, const Monomial& b, const Scalar& c) {
    if (c.is_zero()) return;
    auto key = std::make_pair(a, b);
    auto it = bp.find(key);
    if (it == bp.end()) bp.emplace(std::move(key), c);
    else {
        it->second += c;
        if (it->second.is_zero()) bp.erase(it);
    }
}

/// One middle-born contraction sum_{MN} kernel_{MN} (dR (x) dL).
BiPoly contract_step(const ModeSystem& ms, const RatMat& kernel, const BiPoly& x) {
    BiPoly out;
    MonoDeriv da, db;
    for (auto& [mm, c] : x) {
        for (std::size_t m = 0; m < ms.modes.size(); ++m) {
            if (!deriv_right_mono(mm.first, ms.modes[m], da)) continue;
            for (std::size_t n = 0; n < ms.modes.size(); ++n) {
                if (kernel[m][n] == 0) continue;
                if (!deriv_left_mono(mm.second, ms.modes[n], db)) continue;
                Scalar k = c * Scalar(kernel[m][n]) * Scalar(Rat(da.coeff * db.coeff));
                bipoly_add(out, da.reduced, db.reduced, k);
            }
        }
    }
    return out;
}

Polynomial bipoly_collapse(const BiPoly& x) {
    Polynomial r;
    Monomial prod;
    for (auto& [mm, c] : x) {
        int sign = merge_monomials(mm.first, mm.second, prod);
        if (sign == 0) continue;
        r.add_term(prod, sign < 0 ? -c : c);
    }
    return r;
}

void wick_pair_poly_order(const ModeSystem& ms, const Polynomial& A, const Polynomial& B,
                          const RatMat& kernel, std::vector<Polynomial>& per_contraction) {
    // fills per_contraction[k] with the k-fold contraction term (no i hbar yet)
    BiPoly x;
    for (auto& [ma, ca] : A.terms())
        for (auto& [mb, cb] : B.terms()) bipoly_add(x, ma, mb, ca * cb);
    per_contraction.clear();
    Scalar inv_fact(1);
    for (int k = 0; !x.empty(); ++k) {
        if (k > 0) inv_fact = inv_fact / Scalar(Rat(k));
        Polynomial c = bipoly_collapse(x) * inv_fact;
        per_contraction.push_back(std::move(c));
        x = contract_step(ms, kernel, x);
    }
}

} // namespace

HbarSeries wick_pair(const ModeSystem& ms, const HbarSeries& A, const HbarSeries& B,
                     const RatMat& kernel, int trunc) {
    HbarSeries r;
    r = r.truncated(trunc);
    for (int ka = A.lowest_power(); ka <= A.highest_power(); ++ka) {
        Polynomial pa = A.at(ka);
        if (pa.is_zero()) continue;
        for (int kb = B.lowest_power(); kb <= B.highest_power(); ++kb) {
            Polynomial pb = B.at(kb);
            if (pb.is_zero()) continue;
            std::vector<Polynomial> layers;
            wick_pair_poly_order(ms, pa, pb, kernel, layers);
            Scalar ipow(1);
            for (int k = 0; k < static_cast<int>(layers.size()); ++k) {
                int power = ka + kb + k;
                if (power <= trunc && !layers[k].is_zero())
                    r += HbarSeries::hbar_power(layers[k] * ipow, power, trunc);
                ipow *= Scalar::i();
            }
        }
    }
    return r;
}

HbarSeries star(const ModeSystem& ms, const HbarSeries& A, const HbarSeries& B, int trunc) {
    return wick_pair(ms, A, B, ms.Gplus, trunc);
}

HbarSeries star_commutator(const ModeSystem& ms, const HbarSeries& A, const HbarSeries& B,
                           int trunc) {
    HbarSeries r;
    for (int pa = 0; pa < 2; ++pa) {
        HbarSeries Ap = A.map([&](const Polynomial& p) {
            auto [ev, od] = p.split_parity();
            return pa ? od : ev;
        });
        if (Ap.is_zero()) continue;
        for (int pb = 0; pb < 2; ++pb) {
            HbarSeries Bp = B.map([&](const Polynomial& p) {
                auto [ev, od] = p.split_parity();
                return pb ? od : ev;
            });
            if (Bp.is_zero()) continue;
            HbarSeries t = star(ms, Ap, Bp, trunc);
            HbarSeries u = star(ms, Bp, Ap, trunc);
            if (pa && pb) t += u;
            else t -= u;
            r += t;
        }
    }
    return r;
}

HbarSeries star_power(const ModeSystem& ms, const HbarSeries& A, int n, int trunc) {
    HbarSeries r{Polynomial{Scalar(1)}};
    for (int k = 0; k < n; ++k) r = star(ms, r, A, trunc);
    return r;
}

HbarSeries TimeOrderedFamily::T(const std::vector<HbarSeries>& factors) const {
    if (factors.empty()) return HbarSeries{Polynomial{Scalar(1)}};
    HbarSeries acc = factors.back();
    for (std::size_t i = factors.size() - 1; i-- > 0;)
        acc = wick_pair(*ms_, factors[i], acc, ms_->GF, trunc_);
    return acc;
}

namespace {

/// Enumerates set partitions of {0..n-1} as block lists (blocks and their
/// elements in increasing order).
void set_partitions(int n, std::vector<std::vector<std::vector<int>>>& out) {
    std::vector<std::vector<int>> cur;
    std::function<void(int)> rec = [&](int k) {
        if (k == n) {
            out.push_back(cur);
            return;
        }
        for (auto& blk : cur) {
            blk.push_back(k);
            rec(k + 1);
            blk.pop_back();
        }
        cur.push_back({k});
        rec(k + 1);
        cur.pop_back();
    };
    rec(0);
}

/// Koszul sign of reordering factors (parities par) into concatenated block
/// order: counts odd-odd inversions.
int block_order_sign(const std::vector<std::vector<int>>& blocks, const std::vector<int>& par) {
    std::vector<int> order;
    for (auto& b : blocks) order.insert(order.end(), b.begin(), b.end());
    int inv = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j)
            if (order[i] > order[j] && par[order[i]] && par[order[j]]) inv ^= 1;
    return inv ? -1 : 1;
}

std::vector<int> factor_parities(const std::vector<HbarSeries>& factors) {
    std::vector<int> par;
    par.reserve(factors.size());
    for (auto& f : factors) {
        int p = 0;
        for (int k = f.lowest_power(); k <= f.highest_power(); ++k) {
            if (f.at(k).is_zero()) continue;
            p = f.at(k).parity_or_throw();
            break;
        }
        par.push_back(p);
    }
    return par;
}

} // namespace

HbarSeries RedefinedFamily::T(const std::vector<HbarSeries>& factors) const {
    int n = static_cast<int>(factors.size());
    if (n == 0) return base_->T({});
    std::vector<std::vector<std::vector<int>>> parts;
    set_partitions(n, parts);
    std::vector<int> par = factor_parities(factors);
    HbarSeries r;
    for (auto& blocks : parts) {
        std::vector<HbarSeries> args;
        args.reserve(blocks.size());
        for (auto& b : blocks) {
            if (b.size() == 1) {
                std::vector<HbarSeries> single{factors[b[0]]};
                args.push_back(factors[b[0]] + z_(single));
            } else {
                std::vector<HbarSeries> sub;
                for (int idx : b) sub.push_back(factors[idx]);
                args.push_back(z_(sub));
            }
        }
        HbarSeries t = base_->T(args);
        int nb = static_cast<int>(blocks.size());
        // (hbar/i)^{n-|pi|}
        Scalar pre(1);
        for (int k = 0; k < n - nb; ++k) pre = pre / Scalar::i();
        t = (t * pre).shifted(n - nb);
        if (block_order_sign(blocks, par) < 0) t = t * Scalar(-1);
        r += t;
    }
    return r;
}

HbarSeries RedefinedFamily::T1_inverse(const HbarSeries& s) const {
    // solve T1(X + Z1(X)) = s as a series in hbar; Z1 = O(hbar)
    HbarSeries y = base_->T1_inverse(s);
    HbarSeries x = y;
    for (int iter = 0; iter <= trunc_ + 8; ++iter) {
        std::vector<HbarSeries> single{x};
        HbarSeries next = y - z_(single);
        if (next == x) break;
        x = next;
    }
    return x;
}

HbarSeries connected(const TimeOrderedFamily& fam, const std::vector<HbarSeries>& factors) {
    int n = static_cast<int>(factors.size());
    if (n == 0) return {};
    std::vector<std::vector<std::vector<int>>> parts;
    set_partitions(n, parts);
    std::vector<int> par = factor_parities(factors);
    const ModeSystem& ms = fam.modes();
    int trunc = fam.truncation();
    HbarSeries r;
    for (auto& blocks : parts) {
        int k = static_cast<int>(blocks.size());
        // all orderings of the blocks contribute with weight (-1)^{k+1}/k;
        // enumerate block permutations explicitly for the Koszul signs
        std::vector<int> perm(k);
        for (int j = 0; j < k; ++j) perm[j] = j;
        std::sort(perm.begin(), perm.end());
        do {
            std::vector<std::vector<int>> ordered;
            for (int j : perm) ordered.push_back(blocks[j]);
            HbarSeries prod;
            bool first = true;
            for (auto& b : ordered) {
                std::vector<HbarSeries> sub;
                for (int idx : b) sub.push_back(factors[idx]);
                HbarSeries t = fam.T(sub);
                if (first) { prod = t; first = false; }
                else prod = star(ms, prod, t, trunc);
            }
            Scalar w = Scalar(1) / Scalar(Rat(k));
            if (k % 2 == 0) w = -w;
            if (block_order_sign(ordered, par) < 0) w = -w;
            r += prod * w;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    // (i/hbar)^{n-1}
    Scalar pre(1);
    for (int j = 0; j < n - 1; ++j) pre *= Scalar::i();
    return (r * pre).shifted(-(n - 1));
}

std::vector<HbarSeries> texp_inverse(const TimeOrderedFamily& fam, const HbarSeries& L,
                                     int order) {
    const ModeSystem& ms = fam.modes();
    int trunc = fam.truncation();
    std::vector<HbarSeries> V(order + 1), Vbar(order + 1);
    V[0] = HbarSeries{Polynomial{Scalar(1)}};
    Scalar inv_fact(1);
    Scalar ipow(1);
    for (int k = 1; k <= order; ++k) {
        inv_fact = inv_fact / Scalar(Rat(k));
        ipow *= Scalar::i();
        std::vector<HbarSeries> args(k, L);
        V[k] = (fam.T(args) * (ipow * inv_fact)).shifted(-k);
    }
    Vbar[0] = HbarSeries{Polynomial{Scalar(1)}};
    for (int nn = 1; nn <= order; ++nn) {
        HbarSeries acc;
        for (int j = 1; j <= nn; ++j) acc += star(ms, Vbar[nn - j], V[j], trunc);
        Vbar[nn] = -acc;
    }
    return Vbar;
}

HbarSeries interacting(const TimeOrderedFamily& fam, const HbarSeries& L, int n,
                       const std::vector<HbarSeries>& G) {
    const ModeSystem& ms = fam.modes();
    int trunc = fam.truncation();
    std::vector<HbarSeries> Vbar = texp_inverse(fam, L, n);
    HbarSeries r;
    for (int a = 0; a <= n; ++a) {
        int b = n - a;
        std::vector<HbarSeries> args(b, L);
        args.insert(args.end(), G.begin(), G.end());
        Scalar pre(1);
        Rat fact(1);
        for (int j = 1; j <= b; ++j) { pre *= Scalar::i(); fact *= j; }
        HbarSeries t = (fam.T(args) * (pre / Scalar(fact))).shifted(-b);
        r += star(ms, Vbar[a], t, trunc);
    }
    return r;
}

HbarSeries retarded(const TimeOrderedFamily& fam, const HbarSeries& L, int n,
                    const HbarSeries& G) {
    HbarSeries r = interacting(fam, L, n, {G});
    return r * factorial(n);
}

} // namespace bvlab
