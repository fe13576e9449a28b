#include "bvlab/brackets.hpp"

namespace bvlab {

namespace {

int series_parity(const HbarSeries& s) {
    for (int k = s.lowest_power(); k <= s.highest_power(); ++k) {
        if (s.at(k).is_zero()) continue;
        return s.at(k).parity_or_throw();
    }
    return 0;
}

/// Enumerates compositions k_1 + ... + k_l = n with k_i >= 1.
void compositions(int n, int l, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (l == 1) {
        if (n >= 1) {
            cur.push_back(n);
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    for (int k = 1; k + (l - 1) <= n; ++k) {
        cur.push_back(k);
        compositions(n - k, l - 1, cur, out);
        cur.pop_back();
    }
}

} // namespace

HbarSeries ComputedAnomaly::dhat(const std::vector<Polynomial>& args, int fk, int m) const {
    std::vector<HbarSeries> a;
    a.reserve(args.size());
    for (auto& p : args) a.emplace_back(p);
    return dhat_multi(*ctx_, *fam_, *D_, a, F_, fk, L_, m);
}

HbarSeries ComputedAnomaly::eval(const std::vector<HbarSeries>& args, int fk) const {
    // expand every slot in hbar, evaluate Dhat on classical tuples, drop the
    // classical part slotwise, and reassemble
    HbarSeries total;
    std::vector<int> lo(args.size()), hi(args.size());
    for (std::size_t i = 0; i < args.size(); ++i) {
        lo[i] = args[i].lowest_power();
        hi[i] = args[i].highest_power();
    }
    std::vector<int> idx = lo;
    bool done = args.empty();
    Scalar inv_mfact(1);
    for (int m = 0; m <= l_order_; ++m) {
        if (m > 0) inv_mfact = inv_mfact / Scalar(Rat(m));
        if (args.empty()) {
            HbarSeries v = dhat({}, fk, m);
            v -= HbarSeries{v.classical()};
            total += v * inv_mfact;
            continue;
        }
        idx = lo;
        while (true) {
            std::vector<Polynomial> tuple;
            int shift = 0;
            bool nonzero = true;
            for (std::size_t i = 0; i < args.size(); ++i) {
                Polynomial p = args[i].at(idx[i]);
                if (p.is_zero()) { nonzero = false; break; }
                tuple.push_back(std::move(p));
                shift += idx[i];
            }
            if (nonzero) {
                HbarSeries v = dhat(tuple, fk, m);
                v -= HbarSeries{v.classical()};
                total += (v * inv_mfact).shifted(shift);
            }
            std::size_t carry = 0;
            while (carry < idx.size()) {
                if (++idx[carry] <= hi[carry]) break;
                idx[carry] = lo[carry];
                ++carry;
            }
            if (carry == idx.size()) break;
        }
    }
    (void)done;
    return total;
}

HbarSeries BracketFamily::bracket(const std::vector<HbarSeries>& args, int fk) const {
    int r = static_cast<int>(args.size()) + fk;
    if (r == 0) return {};
    int sign_exp = 0;
    for (auto& a : args) sign_exp ^= series_parity(a);
    Scalar sgn = (sign_exp & 1) ? Scalar(-1) : Scalar(1);

    HbarSeries out;
    if (r == 1) {
        const HbarSeries& X = args.empty() ? F_ : args[0];
        out += s_(X);
        // [X]_h = s X + (-1)^{eps_X} A[X (x) e^L]
        HbarSeries a = args.empty() ? anom_->eval({}, 1) : anom_->eval(args, 0);
        out += a * sgn;
    } else if (r == 2) {
        // [X,Y]_h = (-1)^{eps_X} (X,Y) + (-1)^{eps_X+eps_Y} A[X (x) Y (x) e^L]
        HbarSeries X = args.size() > 0 ? args[0] : F_;
        HbarSeries Y = args.size() > 1 ? args[1] : F_;
        Scalar s1 = (series_parity(X) & 1) ? Scalar(-1) : Scalar(1);
        out += ab_(X, Y) * s1;
        out += anom_->eval(args, fk) * sgn;
    } else {
        out += anom_->eval(args, fk) * sgn;
    }
    return out.truncated(trunc_);
}

HbarSeries BracketFamily::qab(const HbarSeries& X, const HbarSeries& Y) const {
    HbarSeries b = bracket({X, Y}, 0);
    return (series_parity(X) & 1) ? -b : b;
}

HbarSeries BracketFamily::linfty_residual(int n) const {
    HbarSeries res;
    for (int l = 1; l <= n; ++l) {
        HbarSeries inner = diag(l);
        if (inner.is_zero()) continue;
        res += bracket({inner}, n - l) * binomial(n, l);
    }
    return res.truncated(trunc_);
}

HbarSeries apply_layered(const std::vector<LinOp>& layers, const HbarSeries& X, int trunc) {
    HbarSeries r;
    for (int j = 0; j < static_cast<int>(layers.size()); ++j) {
        for (int k = X.lowest_power(); k <= X.highest_power(); ++k) {
            if (j + k > trunc) continue;
            Polynomial p = X.at(k);
            if (p.is_zero()) continue;
            Polynomial hp = layers[j](p);
            if (!hp.is_zero()) r += HbarSeries::hbar_power(hp, j + k, trunc);
        }
    }
    return r;
}

namespace {

HbarSeries exp_bracket_order(const BracketFamily& B, const std::vector<HbarSeries>& Y, int n) {
    // order-n part of [exp(sum_k alpha^k Y_k / k!)]_h:
    // sum_{l>=1} 1/l! sum_{k_1+..+k_l = n} n!/(prod k_i!) [Y_{k_1},..,Y_{k_l}]_h
    HbarSeries out;
    for (int l = 1; l <= n; ++l) {
        std::vector<std::vector<int>> comps;
        std::vector<int> cur;
        compositions(n, l, cur, comps);
        for (auto& ks : comps) {
            std::vector<HbarSeries> slots;
            Rat denom(1);
            for (int k : ks) {
                slots.push_back(Y[k]);
                for (int j = 2; j <= k; ++j) denom *= j;
            }
            for (int j = 2; j <= l; ++j) denom *= j;
            Scalar w = factorial(n) / Scalar(denom);
            HbarSeries b = B.bracket(slots, 0);
            out += b * w;
        }
    }
    return out.truncated(B.truncation());
}

} // namespace

HbarSeries contact_defect(const BracketFamily& B, const ContactTerms& C, int n) {
    std::vector<HbarSeries> Y(n + 1);
    for (int k = 1; k <= n; ++k) {
        Y[k] = (k < static_cast<int>(C.C.size())) ? -C.C[k] : HbarSeries{};
        if (k == 1) Y[k] += B.base();
    }
    return exp_bracket_order(B, Y, n);
}

std::vector<HbarSeries> consistency_residuals(Context& ctx, const ModeSystem& ms,
                                              const TimeOrderedFamily& fam,
                                              const ModeDerivation& D,
                                              const Polynomial& S0gen, const Polynomial& F,
                                              int max_n, int trunc) {
    ComputedAnomaly anom(ctx, fam, D, F);
    auto ab = [&](const HbarSeries& X, const HbarSeries& Y) {
        HbarSeries r;
        for (int kx = X.lowest_power(); kx <= X.highest_power(); ++kx)
            for (int ky = Y.lowest_power(); ky <= Y.highest_power(); ++ky) {
                Polynomial p = mode_antibracket(ctx, ms, X.at(kx), Y.at(ky));
                if (!p.is_zero()) r += HbarSeries::hbar_power(p, kx + ky);
            }
        return r;
    };
    // divided-power anomaly tables GA[k] = A_k(F^{(x)k}) / k!
    std::vector<HbarSeries> GA(max_n + 1);
    Scalar invfact(1);
    for (int k = 1; k <= max_n; ++k) {
        invfact = invfact / Scalar(Rat(k));
        GA[k] = anom.eval({}, k) * invfact;
    }
    Polynomial sF = mode_antibracket(ctx, ms, S0gen, F);
    Polynomial half_ff = mode_antibracket(ctx, ms, F, F) * Scalar::ratio(1, 2);

    std::vector<HbarSeries> res(max_n + 1);
    for (int n = 1; n <= max_n; ++n) {
        HbarSeries lhs = ab(HbarSeries{S0gen}, GA[n]);
        if (n >= 2) lhs += ab(HbarSeries{F}, GA[n - 1]);
        HbarSeries rhs;
        // A[(sF + (F,F)/2) (x) e^F]
        rhs += anom.eval({HbarSeries{sF}}, n - 1) * (Scalar(1) / factorial(n - 1));
        if (n >= 2)
            rhs += anom.eval({HbarSeries{half_ff}}, n - 2) * (Scalar(1) / factorial(n - 2));
        // A[A[e^F] (x) e^F]
        for (int j = 1; j <= n; ++j) {
            if (GA[j].is_zero()) continue;
            rhs += anom.eval({GA[j]}, n - j) * (Scalar(1) / factorial(n - j));
        }
        res[n] = (lhs - rhs).truncated(trunc);
    }
    return res;
}

ContactTerms solve_contact_terms(const BracketFamily& B, const std::vector<LinOp>& h_hbar,
                                 int order) {
    HbarSeries qF = B.q(B.base());
    if (!qF.truncated(B.truncation()).is_zero())
        throw ObstructionNonClosed("solve_contact_terms: F is not q-closed");
    ContactTerms ct;
    ct.C.assign(order + 1, HbarSeries{});
    for (int n = 2; n <= order; ++n) {
        // K_n: all bracket terms of the order-n defect except -q C_n
        std::vector<HbarSeries> Y(n + 1);
        for (int k = 1; k < n; ++k) {
            Y[k] = -ct.C[k];
            if (k == 1) Y[k] += B.base();
        }
        Y[n] = {}; // C_n not yet known; its contribution is -q C_n
        HbarSeries K = exp_bracket_order(B, Y, n);
        HbarSeries qK = B.q(K);
        if (!qK.truncated(B.truncation()).is_zero())
            throw ObstructionNonClosed("solve_contact_terms: K_" + std::to_string(n) +
                                       " is not q-closed");
        ct.C[n] = apply_layered(h_hbar, K, B.truncation());
    }
    return ct;
}

} // namespace bvlab
